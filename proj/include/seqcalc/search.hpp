#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqcalc/kripke.hpp"
#include "seqcalc/tr.hpp"

namespace seqcalc {

// The search tree TR(S0): alternating conjunctive stages (exhaustive
// inversion, the deduction Tr_S) and disjunctive stages (the branching
// rule).  Gate 1 at a node means the sequent there is derivable.
//
// The (br) re-marking of antecedent implications can reproduce a sequent
// already seen below on the same branch (nested antecedent implications,
// e.g. (u->v)->w |- u->v), so the raw construction need not terminate.
// Derivability is the least fixpoint of the and/or recursion and a
// minimal derivation never repeats a sequent along a branch; a repeated
// and/or-position therefore becomes a gate-0 leaf pointing back at its
// ancestor.  Countermodel extraction folds such edges, which a Kripke
// quasi-order accommodates.
enum class NodeKind { AxiomLeaf, AnalyzedLeaf, LoopLeaf, And, Or };

struct SearchNode {
  NodeKind kind = NodeKind::AxiomLeaf;
  Sequent seq;
  int gate = 0;
  DeductionTree tr;  // And only: the inversion deduction rooted at seq
  Branching br;      // Or only
  std::vector<std::unique_ptr<SearchNode>> sons;
  const SearchNode* loop_target = nullptr;  // LoopLeaf: equal ancestor
};

namespace detail {

struct Builder {
  TrContext& ctx;
  const std::set<int>& fixed_vars;
  // Canonical sequents of the and/or-positions on the current branch.
  std::vector<std::pair<Sequent, const SearchNode*>> branch;

  std::unique_ptr<SearchNode> build_and(const Sequent& s) {
    auto n = std::make_unique<SearchNode>();
    n->seq = s;
    if (is_axiom(s)) {
      n->kind = NodeKind::AxiomLeaf;
      n->gate = 1;
      return n;
    }
    if (is_fully_analyzed(s, ctx)) {
      n->kind = NodeKind::AnalyzedLeaf;
      n->gate = 0;
      return n;
    }
    Sequent key = canonical_key(s, fixed_vars);
    for (const auto& [k, node] : branch)
      if (k == key) {
        n->kind = NodeKind::LoopLeaf;
        n->gate = 0;
        n->loop_target = node;
        return n;
      }
    n->kind = NodeKind::And;
    branch.emplace_back(std::move(key), n.get());
    n->tr = build_tr(s, ctx);
    n->gate = 1;
    std::vector<const DeductionTree*> leaves;
    collect_leaves(n->tr, leaves);
    for (const DeductionTree* l : leaves) {
      std::unique_ptr<SearchNode> son;
      if (is_axiom(l->seq)) {
        son = std::make_unique<SearchNode>();
        son->kind = NodeKind::AxiomLeaf;
        son->seq = l->seq;
        son->gate = 1;
      } else if (is_fully_analyzed(l->seq, ctx)) {
        son = std::make_unique<SearchNode>();
        son->kind = NodeKind::AnalyzedLeaf;
        son->seq = l->seq;
        son->gate = 0;
      } else {
        assert(is_non_invertible(l->seq, ctx));
        son = build_or(l->seq);
      }
      if (son->gate == 0) n->gate = 0;
      n->sons.push_back(std::move(son));
    }
    branch.pop_back();
    return n;
  }

  std::unique_ptr<SearchNode> build_or(const Sequent& s) {
    auto n = std::make_unique<SearchNode>();
    n->kind = NodeKind::Or;
    n->seq = s;
    n->br = branch_rule(s, ctx);
    assert(!n->br.continued && "continued sequents belong to the staged search");
    n->gate = 0;
    for (const auto& u : n->br.uppers) {
      n->sons.push_back(build_and(u.seq));
      if (n->sons.back()->gate == 1) n->gate = 1;
    }
    return n;
  }
};

}  // namespace detail

struct SearchTree {
  Mode mode = Mode::Prop;
  Signature sig;
  EigenvariableLedger ledger;
  int N = 0;
  Sequent s0;  // root sequent, all formulas marked
  std::unique_ptr<SearchNode> root;

  bool derivable() const { return root->gate == 1; }
};

inline SearchTree build_search_tree(const Sequent& input, Mode mode) {
  assert(mode != Mode::Full && "full LJm uses the staged search");
  SearchTree t;
  t.mode = mode;
  t.s0 = mark_all(input);
  t.sig = signature_of(t.s0);
  std::set<int> fixed = free_vars(t.s0);
  fixed.insert(0);  // index 0 stays reserved as the seed variable
  int next = 1;
  for (int v : fixed)
    if (v + 1 > next) next = v + 1;
  t.ledger.reserve_at_least(next);
  t.N = root_connective_count(t.s0, mode);
  TrContext ctx;
  ctx.mode = mode;
  ctx.sig = &t.sig;
  ctx.ledger = &t.ledger;
  detail::Builder b{ctx, fixed, {}};
  t.root = b.build_and(t.s0);
  return t;
}

// ---------------------------------------------------------------------------
// Derivation extraction (gate 1): stitch the Tr deductions together at
// conjunctive nodes and pick one derivable branch at each disjunctive
// node, replacing (br) by the single non-invertible inference it stands
// for.  Marks are then erased; erasure can make a step vacuous, in which
// case it is dropped.

namespace detail {

inline DeductionTree extract_marked(const SearchNode& n) {
  assert(n.gate == 1);
  switch (n.kind) {
    case NodeKind::AxiomLeaf: {
      DeductionTree d;
      d.seq = n.seq;
      bool has_bot = false;
      for (const auto& [f, m] : n.seq.antecedent)
        if (f.is_bottom()) has_bot = true;
      d.rule = has_bot ? Rule::AxiomBot : Rule::AxiomT;
      return d;
    }
    case NodeKind::AnalyzedLeaf:
    case NodeKind::LoopLeaf:
      assert(false && "gate 1 node cannot be a refutation leaf");
      return {};
    case NodeKind::And: {
      DeductionTree d = n.tr;
      std::vector<DeductionTree*> leaves;
      collect_leaves(d, leaves);
      assert(leaves.size() == n.sons.size());
      for (size_t i = 0; i < leaves.size(); ++i)
        *leaves[i] = extract_marked(*n.sons[i]);
      return d;
    }
    case NodeKind::Or: {
      for (size_t i = 0; i < n.sons.size(); ++i) {
        if (n.sons[i]->gate != 1) continue;
        DeductionTree d;
        d.seq = n.seq;
        d.rule = n.br.uppers[i].rule;
        d.children.push_back(extract_marked(*n.sons[i]));
        return d;
      }
      assert(false && "gate 1 disjunctive node has a gate 1 son");
      return {};
    }
  }
  return {};
}

}  // namespace detail

inline Sequent unmark(const Sequent& s) {
  Sequent r;
  for (const auto& [f, m] : s.antecedent) r.antecedent.insert(f, false);
  for (const auto& [f, m] : s.succedent) r.succedent.insert(f, false);
  return r;
}

// Erase marks in a deduction, dropping steps made vacuous by erasure.
inline DeductionTree erase_derivation(const DeductionTree& d) {
  DeductionTree out;
  out.seq = unmark(d.seq);
  out.rule = d.rule;
  for (const auto& c : d.children)
    out.children.push_back(erase_derivation(c));
  if (out.children.size() == 1 && out.children[0].seq == out.seq)
    return std::move(out.children[0]);
  return out;
}

inline DeductionTree extract_derivation(const SearchTree& t) {
  return erase_derivation(detail::extract_marked(*t.root));
}

// ---------------------------------------------------------------------------
// Countermodel extraction (gate 0): keep one failing son per conjunctive
// node and every son of each disjunctive node.  Worlds are the chosen
// saturated leaf sequents; the order is the tree order plus folded loop
// edges, closed under reflexivity and transitivity.

struct CountermodelBuild {
  PropKripkeModel model;
  std::vector<Sequent> world_seqs;  // saturated sequent behind each world
};

struct PredCountermodelBuild {
  PredKripkeModel model;
  std::vector<Sequent> world_seqs;
};

namespace detail {

inline std::set<std::string> prop_atoms_true(const Sequent& s) {
  std::set<std::string> out;
  for (const auto& [f, m] : s.antecedent)
    if (f.is_atomic() && f.args.empty()) out.insert(f.pred);
  return out;
}

// The gate 0 Tr leaf chosen at a conjunctive node: an analyzed leaf or a
// disjunctive node.
inline const SearchNode& chosen_failing_son(const SearchNode& n) {
  assert(n.kind == NodeKind::And && n.gate == 0);
  for (const auto& s : n.sons)
    if (s->gate == 0) return *s;
  assert(false && "gate 0 conjunctive node has a gate 0 son");
  return n;
}

// add(seq, parent) creates a world and returns its index; edges beyond
// the tree edges (loop folds) go through link(from, to).
template <typename AddWorld, typename Link>
inline int build_worlds(const SearchNode& n, int parent, AddWorld&& add,
                        Link&& link,
                        std::map<const SearchNode*, int>& world_of) {
  assert(n.gate == 0);
  if (n.kind == NodeKind::AnalyzedLeaf) {
    int w = add(n.seq, parent);
    world_of[&n] = w;
    return w;
  }
  assert(n.kind == NodeKind::And);
  const SearchNode& leaf = chosen_failing_son(n);
  int w = add(leaf.seq, parent);
  world_of[&n] = w;
  if (leaf.kind == NodeKind::Or) {
    for (const auto& son : leaf.sons) {
      if (son->kind == NodeKind::LoopLeaf) {
        assert(world_of.count(son->loop_target));
        link(w, world_of.at(son->loop_target));
      } else {
        build_worlds(*son, w, add, link, world_of);
      }
    }
  } else {
    assert(leaf.kind == NodeKind::AnalyzedLeaf);
  }
  return w;
}

// Reflexive-transitive closure over tree edges plus folded loop edges.
inline std::vector<std::vector<bool>> close_order(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) le[i][i] = true;
  for (const auto& [a, b] : edges) le[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (le[i][k])
        for (int j = 0; j < n; ++j)
          if (le[k][j]) le[i][j] = true;
  return le;
}

}  // namespace detail

inline CountermodelBuild extract_countermodel(const SearchTree& t) {
  assert(t.mode == Mode::Prop && t.root->gate == 0);
  CountermodelBuild out;
  std::vector<std::pair<int, int>> edges;
  auto add = [&](const Sequent& s, int par) {
    out.world_seqs.push_back(s);
    out.model.valuation.push_back(detail::prop_atoms_true(s));
    int w = static_cast<int>(out.world_seqs.size()) - 1;
    if (par >= 0) edges.emplace_back(par, w);
    return w;
  };
  auto link = [&](int a, int b) { edges.emplace_back(a, b); };
  std::map<const SearchNode*, int> world_of;
  detail::build_worlds(*t.root, -1, add, link, world_of);
  out.model.le =
      detail::close_order(static_cast<int>(out.world_seqs.size()), edges);
  out.model.root = 0;
  return out;
}

namespace detail {

inline void collect_subterms(const Term& t, std::set<Term>& out) {
  out.insert(t);
  for (const auto& a : t.args) collect_subterms(a, out);
}

}  // namespace detail

// Positive-fragment countermodel.  The domain of a world is the free
// variables accumulated along its branch plus the subterms of its atomic
// facts; functions are read syntactically, so this finite slice of the
// term universe is all the model ever mentions.
inline PredCountermodelBuild extract_pred_countermodel(const SearchTree& t) {
  assert(t.mode == Mode::Positive && t.root->gate == 0);
  PredCountermodelBuild out;
  std::vector<std::pair<int, int>> edges;
  bool seed = free_vars(t.s0).empty();
  auto add = [&](const Sequent& s, int par) {
    out.world_seqs.push_back(s);
    std::set<Formula> facts;
    std::set<Term> dom;
    if (seed) dom.insert(Term::free(0));
    for (const auto& [f, m] : s.antecedent)
      if (f.is_atomic()) {
        facts.insert(f);
        for (const auto& a : f.args) detail::collect_subterms(a, dom);
      }
    for (int v : free_vars(s)) dom.insert(Term::free(v));
    if (par >= 0)
      for (const auto& d : out.model.domain[par]) dom.insert(d);
    out.model.facts.push_back(std::move(facts));
    out.model.domain.emplace_back(dom.begin(), dom.end());
    int w = static_cast<int>(out.world_seqs.size()) - 1;
    if (par >= 0) edges.emplace_back(par, w);
    return w;
  };
  auto link = [&](int a, int b) { edges.emplace_back(a, b); };
  std::map<const SearchNode*, int> world_of;
  detail::build_worlds(*t.root, -1, add, link, world_of);
  out.model.le =
      detail::close_order(static_cast<int>(out.world_seqs.size()), edges);
  out.model.root = 0;
  return out;
}

// ---------------------------------------------------------------------------
// Semantic steering: given an external model falsifying the root sequent,
// descend the search tree choosing at each conjunctive fork a child whose
// sequent the current world still falsifies, and at each disjunctive node
// a witness world above for every branch.  The invariant makes axiom
// leaves unreachable, which re-proves gate 0 against an independent
// semantic certificate.

struct EmbedResult {
  bool ok = true;
  std::string reason;
  int worlds_visited = 0;
  std::vector<std::pair<Sequent, int>> mapping;  // world sequent -> model world
};

namespace detail {

inline bool invariant_holds(const PropKripkeModel& m, int a, const Sequent& s) {
  for (const auto& [f, mk] : s.antecedent)
    if (!forces(m, a, f)) return false;
  for (const auto& [f, mk] : s.succedent)
    if (forces(m, a, f)) return false;
  return true;
}

struct Embedder {
  const PropKripkeModel& m;
  EmbedResult res;

  void fail(const std::string& why, const Sequent& s) {
    if (!res.ok) return;
    res.ok = false;
    res.reason = why + " at " + to_string_marked(s);
  }

  void visit_and(const SearchNode& n, int a) {
    if (!res.ok) return;
    if (!invariant_holds(m, a, n.seq)) return fail("invariant broken", n.seq);
    switch (n.kind) {
      case NodeKind::AxiomLeaf:
        return fail("axiom reached under falsifying world", n.seq);
      case NodeKind::AnalyzedLeaf:
      case NodeKind::LoopLeaf:
        // A loop leaf repeats an ancestor position already verified.
        ++res.worlds_visited;
        res.mapping.emplace_back(n.seq, a);
        return;
      case NodeKind::And: {
        // Steer through the inversion deduction.
        std::vector<const DeductionTree*> leaves;
        collect_leaves(n.tr, leaves);
        std::map<const DeductionTree*, size_t> leaf_index;
        for (size_t i = 0; i < leaves.size(); ++i) leaf_index[leaves[i]] = i;
        const DeductionTree* cur = &n.tr;
        while (!cur->is_leaf()) {
          const DeductionTree* next = nullptr;
          for (const auto& c : cur->children)
            if (invariant_holds(m, a, c.seq)) {
              next = &c;
              break;
            }
          if (!next)
            return fail("no inversion branch preserves the invariant",
                        cur->seq);
          cur = next;
        }
        const SearchNode& son = *n.sons[leaf_index.at(cur)];
        if (son.kind == NodeKind::Or) return visit_or(son, a);
        return visit_and(son, a);
      }
      case NodeKind::Or:
        return visit_or(n, a);
    }
  }

  void visit_or(const SearchNode& n, int a) {
    if (!res.ok) return;
    if (!invariant_holds(m, a, n.seq)) return fail("invariant broken", n.seq);
    ++res.worlds_visited;
    res.mapping.emplace_back(n.seq, a);
    for (size_t i = 0; i < n.sons.size() && res.ok; ++i) {
      const Formula& p = n.br.uppers[i].principal;  // gamma -> delta
      int b = -1;
      for (int v = 0; v < m.size(); ++v)
        if (m.le[a][v] && forces(m, v, p.left()) && !forces(m, v, p.right())) {
          b = v;
          break;
        }
      if (b < 0)
        return fail("no witness world above for " + to_string(p), n.seq);
      visit_and(*n.sons[i], b);
    }
  }
};

}  // namespace detail

inline EmbedResult embed(const SearchTree& t, const PropKripkeModel& m) {
  assert(t.mode == Mode::Prop);
  detail::Embedder e{m, {}};
  e.visit_and(*t.root, m.root);
  return e.res;
}

// ---------------------------------------------------------------------------
// Audit of the termination measure: the paper asserts dp strictly
// decreases along every edge of the fulfilled deduction.  The audit
// reports the first violating edge; (br) steps that re-mark nested
// antecedent implications do violate it (see the loop note above).

namespace detail {

inline std::optional<std::string> check_dp_edge(const Sequent& lower,
                                                const Sequent& upper, int N,
                                                Mode mode) {
  long long lo = measures(lower, N, mode).dp;
  long long hi = measures(upper, N, mode).dp;
  if (hi < lo) return std::nullopt;
  return "dp failed to decrease: " + std::to_string(lo) + " -> " +
         std::to_string(hi) + " from " + to_string_marked(lower) + " to " +
         to_string_marked(upper);
}

inline std::optional<std::string> audit_tr_dp(const DeductionTree& d, int N,
                                              Mode mode) {
  for (const auto& c : d.children) {
    if (auto e = check_dp_edge(d.seq, c.seq, N, mode)) return e;
    if (auto e = audit_tr_dp(c, N, mode)) return e;
  }
  return std::nullopt;
}

inline std::optional<std::string> audit_dp(const SearchNode& n, int N,
                                           Mode mode) {
  if (n.kind == NodeKind::And)
    if (auto e = audit_tr_dp(n.tr, N, mode)) return e;
  if (n.kind == NodeKind::Or)
    for (const auto& u : n.br.uppers)
      if (auto e = check_dp_edge(n.seq, u.seq, N, mode)) return e;
  for (const auto& s : n.sons)
    if (auto e = audit_dp(*s, N, mode)) return e;
  return std::nullopt;
}

}  // namespace detail

inline std::optional<std::string> verify_dp_decreasing(const SearchTree& t) {
  return detail::audit_dp(*t.root, t.N, t.mode);
}

inline int search_node_count(const SearchNode& n) {
  int c = 1;
  for (const auto& s : n.sons) c += search_node_count(*s);
  return c;
}

}  // namespace seqcalc
