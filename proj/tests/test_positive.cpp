#include <catch2/catch_amalgamated.hpp>

#include "seqcalc/check.hpp"
#include "seqcalc/decide.hpp"

using namespace seqcalc;

namespace {

Formula pf(const std::string& t) { return parse_formula(t); }

struct Ctx {
  Signature sig;
  EigenvariableLedger ledger;
  TrContext ctx;
  explicit Ctx(const Sequent& s) {
    sig = signature_of(s);
    ctx.mode = Mode::Positive;
    ctx.sig = &sig;
    ctx.ledger = &ledger;
    for (int v : free_vars(s)) ledger.reserve_at_least(v + 1);
    ledger.reserve_at_least(1);
  }
};

struct Outcome {
  bool derivable;
  Decision decision;
};

Outcome run(const std::string& t) {
  Sequent s = parse_sequent(t);
  REQUIRE(is_positive_sequent(s));
  Decision d = decide(s, Mode::Positive);
  // dichotomy self-verification on every call
  if (d.verdict == Verdict::Derivable) {
    REQUIRE(d.derivation.has_value());
    auto err = check_derivation_of(*d.derivation, unmark(mark_all(s)));
    if (err) INFO(*err);
    REQUIRE_FALSE(err.has_value());
  } else {
    REQUIRE(d.verdict == Verdict::Underivable);
    REQUIRE(d.pred_model.has_value());
    auto err = validate(d.pred_model->model);
    if (err) INFO(*err);
    REQUIRE_FALSE(err.has_value());
    REQUIRE(falsifies(d.pred_model->model, s));
  }
  return {d.verdict == Verdict::Derivable, std::move(d)};
}

}  // namespace

TEST_CASE("positive branch rule introduces fresh eigenvariables") {
  // (P(a0)deg => (forall y Q(y))deg) -> one upper (P(a0) => Q(a1)deg)
  Sequent s = mark_all(parse_sequent("P(a0) |- forall y. Q(y)"));
  Ctx c(s);
  Branching br = branch_rule(s, c.ctx);
  REQUIRE(br.uppers.size() == 1);
  CHECK(br.uppers[0].rule == Rule::AllR);
  const Sequent& up = br.uppers[0].seq;
  bool found = false;
  for (const auto& [f, m] : up.succedent)
    if (f.is_atomic() && f.pred == "Q") {
      found = true;
      REQUIRE(f.args.size() == 1);
      CHECK(f.args[0].kind == Term::Kind::Free);
      CHECK(f.args[0].index != 0);  // fresh, distinct from a0
      CHECK(m);
    }
  CHECK(found);

  // one implication upper plus one forall upper with a fresh variable,
  // pairwise distinct eigenvariables
  Sequent t = mark_all(parse_sequent("|- p -> q, forall y. R(y, a0)"));
  Ctx ct(t);
  Branching brt = branch_rule(t, ct.ctx);
  REQUIRE(brt.uppers.size() == 2);
  std::set<int> eigen;
  for (const auto& u : brt.uppers)
    for (int v : free_vars(u.seq))
      if (v != 0) eigen.insert(v);
  CHECK(!eigen.empty());
  // the ledger never hands the same index out twice
  std::set<int> seen(ct.ledger.introduced.begin(), ct.ledger.introduced.end());
  CHECK(seen.size() == ct.ledger.introduced.size());
}

TEST_CASE("spec decision examples") {
  CHECK(run("forall x. P(x) |- P(a0)").derivable);
  CHECK(run("forall x. forall y. R(x,y) |- forall y. forall x. R(x,y)")
            .derivable);

  Outcome o = run("P(a0) |- forall x. P(x)");
  CHECK_FALSE(o.derivable);
  // the model has a world whose domain gained a fresh element outside P
  const PredKripkeModel& m = o.decision.pred_model->model;
  bool witness = false;
  for (int w = 0; w < m.size(); ++w)
    for (const auto& d : m.domain[w])
      if (!m.facts[w].count(Formula::atom("P", {d}))) witness = true;
  CHECK(witness);
}

TEST_CASE("positive suite") {
  CHECK(run("|- (forall x. P(x)) -> P(a0)").derivable);
  CHECK(run("forall x. P(x) |- forall x. P(x)").derivable);
  CHECK(run("forall x. R(x, a0) |- R(a0, a0)").derivable);
  CHECK(run("forall x. (P(x) & Q(x)) |- forall x. P(x)").derivable);
  CHECK(run("|- ~~ forall x. P(x)").derivable == false);
  CHECK(run("forall x. P(x), forall x. (P(x) -> Q(x)) |- Q(a0)").derivable);

  CHECK_FALSE(run("P(a0) |- forall x. Q(x)").derivable);
  CHECK_FALSE(run("forall x. P(x) |- Q(a0)").derivable);
  CHECK_FALSE(run("|- forall x. P(x)").derivable);
  CHECK_FALSE(run("forall x. (P(x) | Q(x)) |- forall x. P(x)").derivable);
}

TEST_CASE("extracted model domains grow along the order") {
  for (const std::string& t :
       {"P(a0) |- forall x. P(x)", "|- forall x. P(x)",
        "forall x. (P(x) | Q(x)) |- forall x. P(x)",
        "Q(a0) |- forall x. forall y. R(x, y)"}) {
    Outcome o = run(t);
    REQUIRE_FALSE(o.derivable);
    const PredKripkeModel& m = o.decision.pred_model->model;
    for (int w = 0; w < m.size(); ++w) {
      CHECK(!m.domain[w].empty());
      for (int v = 0; v < m.size(); ++v)
        if (m.le[w][v])
          for (const auto& d : m.domain[w]) {
            bool present = false;
            for (const auto& e : m.domain[v])
              if (e == d) present = true;
            CHECK(present);
          }
    }
  }
}

TEST_CASE("predicate dp measure decreases on sample searches") {
  for (const std::string& t :
       {"|- forall x. P(x)", "P(a0) |- forall x. P(x)",
        "P(a0), Q(a0) |- forall x. P(x)"}) {
    SearchTree tree = build_search_tree(parse_sequent(t), Mode::Positive);
    auto v = verify_dp_decreasing(tree);
    if (v) INFO(t + ": " + *v);
    CHECK_FALSE(v.has_value());
  }
  // the measure gives no weight to negative universals, so an antecedent
  // instantiation step can keep dp constant; the audit reports it
  SearchTree stall =
      build_search_tree(parse_sequent("forall x. P(x) |- P(a0)"),
                        Mode::Positive);
  CHECK(verify_dp_decreasing(stall).has_value());
}

TEST_CASE("positive mode rejects nothing silently") {
  // the decidable boundary: these are not positive, and the diagnostic
  // names the offending occurrence
  for (const std::string& t :
       {"|- exists y. P(y)", "|- ~~ forall x. (P(x) | ~P(x))",
        "forall x. exists y. R(x,y) |- p"}) {
    Sequent s = parse_sequent(t);
    CHECK_FALSE(is_positive_sequent(s));
    CHECK(positivity_diagnostic(s).has_value());
  }
}
