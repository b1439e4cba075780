#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "seqcalc/decide.hpp"

using namespace seqcalc;

namespace {

Formula pf(const std::string& t) { return parse_formula(t); }

PropKripkeModel two_chain() {
  // w0 below w1; p holds only at w1
  PropKripkeModel m;
  m.valuation = {{}, {"p"}};
  m.le = {{true, true}, {false, true}};
  m.root = 0;
  return m;
}

// random monotone model over the given atoms
PropKripkeModel random_model(std::mt19937& rng,
                             const std::vector<std::string>& atoms) {
  int n = 1 + static_cast<int>(rng() % 4);
  PropKripkeModel m;
  m.root = 0;
  m.le.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) m.le[i][i] = true;
  for (int i = 1; i < n; ++i) {
    int parent = static_cast<int>(rng() % i);
    for (int j = 0; j < n; ++j)
      if (m.le[j][parent]) m.le[j][i] = true;
  }
  m.valuation.assign(n, {});
  for (const auto& a : atoms)
    for (int w = 0; w < n; ++w)
      if (rng() % 3 == 0)
        for (int v = 0; v < n; ++v)
          if (m.le[w][v]) m.valuation[v].insert(a);
  return m;
}

// random formula over the given atoms
Formula random_formula(std::mt19937& rng,
                       const std::vector<std::string>& atoms, int depth) {
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 6 == 0) return Formula::bottom();
    return Formula::atom(atoms[rng() % atoms.size()]);
  }
  Formula l = random_formula(rng, atoms, depth - 1);
  Formula r = random_formula(rng, atoms, depth - 1);
  switch (rng() % 3) {
    case 0: return Formula::disj(l, r);
    case 1: return Formula::conj(l, r);
    default: return Formula::implies(l, r);
  }
}

}  // namespace

TEST_CASE("forcing clauses") {
  PropKripkeModel m = two_chain();
  CHECK_FALSE(forces(m, 0, Formula::bottom()));
  CHECK_FALSE(forces(m, 1, Formula::bottom()));
  CHECK_FALSE(forces(m, 0, pf("p")));
  CHECK(forces(m, 1, pf("p")));
  CHECK(forces(m, 0, pf("~~p")));
  CHECK_FALSE(forces(m, 0, pf("p | ~p")));
  CHECK(forces(m, 1, pf("p | ~p")));
  CHECK_FALSE(forces(m, 0, pf("~p")));
  CHECK(forces(m, 0, pf("q -> p")));  // q holds nowhere, vacuously true
  CHECK(forces(m, 0, pf("p -> p")));
}

TEST_CASE("falsifies") {
  PropKripkeModel m = two_chain();
  CHECK(falsifies(m, parse_sequent("|- p | ~p")));
  CHECK_FALSE(falsifies(m, parse_sequent("p |- p")));

  PropKripkeModel one;
  one.valuation = {{"p"}};
  one.le = {{true}};
  CHECK(falsifies(one, parse_sequent("p |- q")));
}

TEST_CASE("model validation") {
  PropKripkeModel m = two_chain();
  CHECK_FALSE(validate(m).has_value());

  PropKripkeModel bad = two_chain();
  bad.valuation[0] = {"p", "q"};  // q not monotone upward
  CHECK(validate(bad).has_value());

  PropKripkeModel irref = two_chain();
  irref.le[0][0] = false;
  CHECK(validate(irref).has_value());
}

TEST_CASE("brute force oracle") {
  auto m1 = brute_force_countermodel(parse_sequent("|- p | ~p"), 2);
  REQUIRE(m1.has_value());
  CHECK(falsifies(*m1, parse_sequent("|- p | ~p")));

  CHECK_FALSE(brute_force_countermodel(parse_sequent("p |- p")).has_value());

  auto peirce =
      brute_force_countermodel(parse_sequent("|- ((p -> q) -> p) -> p"), 2);
  REQUIRE(peirce.has_value());
  CHECK_FALSE(validate(*peirce).has_value());
}

TEST_CASE("monotonicity of forcing") {
  std::mt19937 rng(7);
  std::vector<std::string> atoms = {"p", "q", "r"};
  for (int trial = 0; trial < 200; ++trial) {
    PropKripkeModel m = random_model(rng, atoms);
    REQUIRE_FALSE(validate(m).has_value());
    Formula f = random_formula(rng, atoms, 3);
    for (int w = 0; w < m.size(); ++w)
      if (forces(m, w, f))
        for (int v = 0; v < m.size(); ++v)
          if (m.le[w][v]) CHECK(forces(m, v, f));
  }
}

TEST_CASE("predicate model forcing and validation") {
  // 1 world, D = {a0}, P empty: forall x. P(x) fails
  PredKripkeModel m;
  m.domain = {{Term::free(0)}};
  m.facts = {{}};
  m.le = {{true}};
  CHECK_FALSE(forces(m, 0, pf("forall x. P(x)")));
  CHECK_FALSE(validate(m).has_value());

  // 2-world chain, child gains a1 outside P: falsifies P(a0) => forall x P(x)
  PredKripkeModel c;
  c.domain = {{Term::free(0)}, {Term::free(0), Term::free(1)}};
  Formula pa0 = Formula::atom("P", {Term::free(0)});
  c.facts = {{pa0}, {pa0}};
  c.le = {{true, true}, {false, true}};
  CHECK_FALSE(validate(c).has_value());
  CHECK(falsifies(c, parse_sequent("P(a0) |- forall x. P(x)")));
  CHECK(forces(c, 0, pf("exists y. P(y)")));

  // domain monotonicity violation is pinpointed
  PredKripkeModel bad = c;
  bad.domain[1] = {Term::free(1)};
  auto err = validate(bad);
  REQUIRE(err.has_value());
  CHECK(err->find("domain not monotone") != std::string::npos);

  // fact monotonicity violation
  PredKripkeModel bad2 = c;
  bad2.facts[1] = {};
  auto err2 = validate(bad2);
  REQUIRE(err2.has_value());
  CHECK(err2->find("facts not monotone") != std::string::npos);
}

TEST_CASE("embedding a countermodel into an external model") {
  // the spec walk-through: embed the search tree for |- p | ~p into the
  // canonical 2-world chain
  Sequent s = parse_sequent("|- p | ~p");
  SearchTree t = build_search_tree(s, Mode::Prop);
  REQUIRE_FALSE(t.derivable());
  PropKripkeModel m = two_chain();
  EmbedResult e = embed(t, m);
  if (!e.ok) INFO(e.reason);
  CHECK(e.ok);

  // embedding fails if the model does not falsify the root sequent
  PropKripkeModel allp;
  allp.valuation = {{"p"}};
  allp.le = {{true}};
  EmbedResult bad = embed(t, allp);
  CHECK_FALSE(bad.ok);

  // every oracle model embeds
  for (const std::string& txt :
       {"|- ((p -> q) -> p) -> p", "|- ~~p -> p", "p -> q |- ~p | q",
        "|- (p -> q) | (q -> p)", "~(p & q) |- ~p | ~q"}) {
    Sequent sq = parse_sequent(txt);
    SearchTree tree = build_search_tree(sq, Mode::Prop);
    REQUIRE_FALSE(tree.derivable());
    auto oracle = brute_force_countermodel(sq, 3);
    REQUIRE(oracle.has_value());
    EmbedResult r = embed(tree, *oracle);
    if (!r.ok) INFO(txt + ": " + r.reason);
    CHECK(r.ok);
  }
}
