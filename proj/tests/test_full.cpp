#include <catch2/catch_amalgamated.hpp>

#include "seqcalc/check.hpp"
#include "seqcalc/chi.hpp"
#include "seqcalc/transfer.hpp"

using namespace seqcalc;

namespace {

Formula pf(const std::string& t) { return parse_formula(t); }

FullResult run(const std::string& text, Verdict expect, int depth = 10) {
  Sequent s = parse_sequent(text);
  FullResult r = decide_full(s, depth);
  INFO(text + " -> " + verdict_name(r.verdict) +
       (r.note.empty() ? "" : " [" + r.note + "]"));
  CHECK(r.verdict == expect);
  if (r.verdict == Verdict::Derivable) {
    auto err = check_derivation_of(*r.derivation, unmark(mark_all(s)));
    if (err) INFO(*err);
    CHECK_FALSE(err.has_value());
  }
  if (r.verdict == Verdict::Underivable) {
    CHECK_FALSE(validate(r.model->model).has_value());
    CHECK(falsifies(r.model->model, s));
  }
  return r;
}

int rank(Gate g) {
  switch (g) {
    case Gate::Or:
    case Gate::And: return 0;
    case Gate::Zero: return 1;
    case Gate::One: return 2;
  }
  return 0;
}

}  // namespace

TEST_CASE("staged decisions on the spec examples") {
  run("forall x. P(x) |- exists y. P(y)", Verdict::Derivable);
  run("exists y. P(y) |- forall x. P(x)", Verdict::Underivable);
  run("|- ~~ forall x. (P(x) | ~P(x))", Verdict::Unknown, 6);
}

TEST_CASE("staged decisions, wider sample") {
  run("forall x. P(x) |- P(a0)", Verdict::Derivable);
  run("P(a0) |- forall x. P(x)", Verdict::Underivable);
  run("|- p -> p", Verdict::Derivable);
  run("forall x. forall y. R(x,y) |- forall y. forall x. R(x,y)",
      Verdict::Derivable);
  run("exists x. P(x), forall y. (P(y) -> q) |- q", Verdict::Derivable);
  run("|- (forall x. P(x)) -> exists y. P(y)", Verdict::Derivable);
  run("exists x. Q(x) |- forall x. Q(x)", Verdict::Underivable);
  // the continued sequent keeps re-marking the succedent existential, so
  // the conservative closed-evidence criterion never fires here
  run("|- exists y. P(y)", Verdict::Unknown, 6);
  run("|- (exists y. P(y)) -> exists y. P(y)", Verdict::Derivable);
}

TEST_CASE("underivable evidence is a two world model for the swap") {
  FullResult r = run("exists y. P(y) |- forall x. P(x)", Verdict::Underivable);
  const PredKripkeModel& m = r.model->model;
  CHECK(m.size() >= 2);
  // the child world gains a domain element outside P
  bool witness = false;
  for (int w = 0; w < m.size(); ++w)
    for (const auto& d : m.domain[w])
      if (!m.facts[w].count(Formula::atom("P", {d}))) witness = true;
  CHECK(witness);
}

TEST_CASE("branch rule with continued sequent") {
  // an unmarked antecedent forall alone yields a continued sequent and
  // no non-invertible uppers
  Signature sig;
  EigenvariableLedger ledger;
  ledger.reserve_at_least(1);
  TrContext ctx;
  ctx.mode = Mode::Full;
  ctx.sig = &sig;
  ctx.ledger = &ledger;

  Sequent s;
  s.antecedent.insert(pf("forall x. P(x)"), false);
  s.succedent.insert(pf("q"), true);
  Branching br = branch_rule(s, ctx);
  REQUIRE(br.continued.has_value());
  CHECK(br.uppers.empty());
  CHECK(br.continued->antecedent.contains_marked(pf("forall x. P(x)")));

  // a marked succedent forall alone: one upper, no continued sequent
  Sequent t;
  t.antecedent.insert(pf("p"), true);
  t.succedent.insert(pf("forall y. Q(y)"), true);
  Branching brt = branch_rule(t, ctx);
  CHECK_FALSE(brt.continued.has_value());
  REQUIRE(brt.uppers.size() == 1);
  CHECK(brt.uppers[0].rule == Rule::AllR);
}

TEST_CASE("oplus construction") {
  CHECK(to_string(oplus(pf("forall x. (P(x) -> Q(x))"), pf("r"))) ==
        to_string(pf("forall x. (P(x) -> (Q(x) | r))")));
  CHECK(to_string(oplus(pf("p"), pf("q"))) == to_string(pf("p | q")));
  CHECK(to_string(oplus(pf("p -> q"), pf("r"))) ==
        to_string(pf("p -> (q | r)")));

  // (alpha | beta) -> oplus(alpha, beta) is derivable
  for (auto [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"p", "q"},
           {"p -> q", "r"},
           {"forall x. (P(x) -> Q(x))", "r"},
           {"p & q", "r"}}) {
    Formula merged = oplus(pf(a), pf(b));
    Sequent s;
    s.succedent.insert(
        Formula::implies(Formula::disj(pf(a), pf(b)), merged), false);
    FullResult r = decide_full(s, 10);
    INFO(a + " , " + b);
    CHECK(r.verdict == Verdict::Derivable);
  }

  // oplus(alpha, bot) is equivalent to alpha
  for (const std::string& a : {"p", "p -> q", "forall x. (P(x) -> Q(x))"}) {
    Formula alpha = pf(a);
    Formula merged = oplus(alpha, Formula::bottom());
    Sequent fwd, bwd;
    fwd.antecedent.insert(merged, false);
    fwd.succedent.insert(alpha, false);
    bwd.antecedent.insert(alpha, false);
    bwd.succedent.insert(merged, false);
    INFO(a);
    CHECK(decide_full(fwd, 12).verdict == Verdict::Derivable);
    CHECK(decide_full(bwd, 12).verdict == Verdict::Derivable);
  }
}

TEST_CASE("chi over a selected subtree") {
  Sequent s = parse_sequent("exists y. P(y) |- forall x. P(x)");
  StagedTree t = build_staged(s, 10);
  std::vector<int> val;
  compute_values(t, val);
  SelectedTree sel;
  REQUIRE(detail::select_subtree(t, val, 0, sel));
  Formula c = chi_tree(t, sel);
  // the characteristic formula round-trips through the printer
  CHECK(to_string(pf(to_string(c))) == to_string(c));
  // empty-cedent conventions inside chi
  Sequent empty;
  CHECK(to_string(chi(empty)) == to_string(pf("(bot -> bot) -> bot")));
}

TEST_CASE("transfer fixtures reach a fixpoint") {
  struct Case {
    std::string text;
    int depth;
    bool expect_pairs;
  };
  for (const Case& c : {Case{"forall x. R(x) |- p -> (R(a0) & q)", 4, true},
                        Case{"forall x. R(x) |- p -> (R(a0) & q)", 6, true},
                        Case{"forall x. R(x), s |- p -> (q -> (R(a0) & u))",
                             6, true},
                        Case{"forall x. P(x) |- exists y. P(y)", 4, false},
                        Case{"p, p -> q |- q", 4, false}}) {
    Sequent s = parse_sequent(c.text);
    StagedTree t = build_staged(s, c.depth);
    auto pairs = find_transferable_pairs(t);
    INFO(c.text);
    CHECK(pairs.empty() != c.expect_pairs);
    CHECK_FALSE(audit_eigenvariables(t).has_value());
    if (pairs.empty()) continue;
    TransferOutcome out = transfer_to_fixpoint(t, c.depth);
    CHECK(out.fixpoint);
    CHECK_FALSE(out.audit_error.has_value());
    // gates only move upward in the order or,and < 0 < 1
    for (const auto& ch : out.changes) CHECK(rank(ch.to) > rank(ch.from));
    // no transferable pair with infimum within the depth limit remains
    int within = 0;
    for (const auto& p : find_transferable_pairs(t))
      if (t.nodes[p.rho].depth <= c.depth) ++within;
    CHECK(within == 0);
  }
}

TEST_CASE("deeper budgets keep the verdict stable") {
  for (const std::string& t :
       {"forall x. P(x) |- exists y. P(y)", "exists y. P(y) |- forall x. P(x)"}) {
    Sequent s = parse_sequent(t);
    Verdict v4 = decide_full(s, 4).verdict;
    Verdict v8 = decide_full(s, 8).verdict;
    INFO(t);
    CHECK(v4 == v8);
    CHECK(v4 != Verdict::Unknown);
  }
}
