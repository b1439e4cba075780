#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqcalc/search.hpp"

namespace seqcalc {

// Staged proof search for full LJm.  Universal antecedent and existential
// succedent formulas force term instantiation, so stages test only the
// finite slice Tm(A) restricted to the first n terms, where n is the node
// depth and A the free variables gathered along continued paths.  The
// tree TR(S0) alternates conjunctive stages (the deduction Tr at every
// pending and-node) and disjunctive stages (the branching rule at every
// pending or-node), with the leftmost branching son carrying the
// postponed instantiations (the continued sequent).

enum class Gate { Or, And, Zero, One };

inline std::string gate_name(Gate g) {
  switch (g) {
    case Gate::Or: return "or";
    case Gate::And: return "and";
    case Gate::Zero: return "0";
    case Gate::One: return "1";
  }
  return "?";
}

struct TRNode {
  Sequent seq;
  Gate gate = Gate::And;  // current gate; evolves only upward (or,and < 0 < 1)
  Gate made = Gate::And;  // gate at creation; or-nodes keep shaping the
                          // continued-path order even if their gate settles
  DeductionTree ded;      // and: the deduction Tr; or: the branching step
  Branching br;           // or only; uppers align with son slots 1..
  // Son ids by component index.  Slot 0 of an or-node is the continued
  // sequent, or -1 when absent; arms start at slot 1.  And-node sons are
  // the Tr leaves in order.
  std::vector<int> sons;
  int parent = -1;
  int component = -1;  // index of this node among parent's sons
  int depth = 0;       // lh(sigma)
  bool expanded = false;
  // FV of the continued cone above this node: union of FV(tau) over all
  // tau this node cont-extends to.  Maintained incrementally on insertion.
  std::set<int> fv_cont;
  // (n,A) under which this node was classified; reused when branching.
  int stage_n = 0;
  std::set<int> stage_A;
  bool loop = false;  // gate 0 by branch repetition, not by full analysis
  bool circ = false;  // or-node collapsed to a re-marking step by transfer
  // and only: eigenvariables of exists-left steps between the Tr root and
  // each leaf, for characteristic formulas.
  std::vector<std::vector<int>> exl_vars;
};

struct StagedStats {
  int stages = 0;
  int node_count = 0;
  long long deduction_nodes = 0;
};

struct StagedTree {
  Signature sig;
  EigenvariableLedger ledger;
  Sequent s0;
  std::vector<TRNode> nodes;  // arena, 0 = root
  std::set<int> root_fv;      // FV of the root node, seeded with a0 if empty
  StagedStats stats;
  int max_nodes = 200000;
  bool exhausted = false;  // node budget hit, results capped at Unknown

  const TRNode& at(int id) const { return nodes[id]; }
  TRNode& at(int id) { return nodes[id]; }

  std::set<int> node_fv(int id) const {
    if (id == 0) return root_fv;
    return free_vars(nodes[id].seq);
  }

  bool is_ancestor(int a, int b) const {  // a subset_e b, reflexive
    while (b != -1) {
      if (a == b) return true;
      b = nodes[b].parent;
    }
    return false;
  }

  // a subset_e^0 b: b extends a taking the continued son (component 0)
  // at every or-node passed through, a included, b excluded.
  bool cont_extends(int a, int b) const {
    std::vector<int> path;  // b down to a, exclusive of a
    for (int x = b; x != a; x = nodes[x].parent) {
      if (x == -1) return false;
      path.push_back(x);
    }
    for (int x : path)
      if (nodes[nodes[x].parent].made == Gate::Or && nodes[x].component != 0)
        return false;
    return true;
  }

  // FV gathered along continued paths reachable from ancestors of sigma.
  std::set<int> fv_sub(int sigma) const {
    std::set<int> out;
    for (int rho = sigma; rho != -1; rho = nodes[rho].parent)
      out.insert(nodes[rho].fv_cont.begin(), nodes[rho].fv_cont.end());
    return out;
  }

  // Recompute every fv_cont from scratch; used after tree surgery.
  void rebuild_fv_cont() {
    for (auto& n : nodes) n.fv_cont.clear();
    for (int tau = 0; tau < static_cast<int>(nodes.size()); ++tau)
      seed_fv_cont(tau);
  }

  // Push FV(tau) into fv_cont of every node tau cont-extends from: walking
  // up, the chain of valid origins ends at the first or-step off slot 0.
  void seed_fv_cont(int tau) {
    std::set<int> fv = node_fv(tau);
    for (int x = tau; x != -1; x = nodes[x].parent) {
      nodes[x].fv_cont.insert(fv.begin(), fv.end());
      int p = nodes[x].parent;
      if (p != -1 && nodes[p].made == Gate::Or && nodes[x].component != 0)
        break;
    }
  }
};

namespace detail {

inline TrContext staged_ctx(StagedTree& t) {
  TrContext ctx;
  ctx.mode = Mode::Full;
  ctx.sig = &t.sig;
  ctx.ledger = &t.ledger;
  return ctx;
}

// Classification of a freshly created node, per the staged construction:
// axiom gets gate 1, a fully analyzed sequent gate 0; anything else still
// has work and alternates to the other stage kind.
inline Gate classify(const Sequent& s, const TrContext& ctx, Gate pending) {
  if (is_axiom(s)) return Gate::One;
  if (is_fully_analyzed(s, ctx)) return Gate::Zero;
  return pending;
}

// Branch repetition on a quantifier-free sequent is a refutation: stages
// add nothing (there is nothing to instantiate), and a minimal derivation
// never revisits a position.  Quantified sequents are exempt, since a
// later stage sees a larger term slice.  Only and-nodes are compared:
// a branching premise equal to an earlier and-node means the branch has
// come full circle, whereas an or-node may equal its own and-parent
// innocuously when the Tr deduction is trivial.
inline bool repeats_ancestor(const StagedTree& t, const Sequent& s,
                             int parent) {
  for (const auto& [f, m] : s.antecedent)
    if (has_quantifier(f)) return false;
  for (const auto& [f, m] : s.succedent)
    if (has_quantifier(f)) return false;
  Sequent key = canonical_key(s, t.root_fv);
  for (int x = parent; x != -1; x = t.nodes[x].parent)
    if (t.nodes[x].made == Gate::And &&
        canonical_key(t.nodes[x].seq, t.root_fv) == key)
      return true;
  return false;
}

inline int add_node(StagedTree& t, Sequent seq, int parent, int component,
                    Gate gate) {
  TRNode n;
  n.seq = std::move(seq);
  n.gate = n.made = gate;
  n.parent = parent;
  n.component = component;
  n.depth = parent < 0 ? 0 : t.nodes[parent].depth + 1;
  t.nodes.push_back(std::move(n));
  t.stats.node_count = static_cast<int>(t.nodes.size());
  int id = static_cast<int>(t.nodes.size()) - 1;
  t.seed_fv_cont(id);
  return id;
}

// Eigenvariables of exists-left inferences along each root-to-leaf path
// of a Tr deduction, in introduction order.
inline void collect_exl_paths(const DeductionTree& d, std::vector<int>& acc,
                              std::vector<std::vector<int>>& out) {
  if (d.is_leaf()) {
    out.push_back(acc);
    return;
  }
  size_t mark = acc.size();
  if (d.rule == Rule::ExL) {
    // the eigenvariable is the one free variable of the upper sequent
    // absent from the lower
    std::set<int> lo = free_vars(d.seq);
    for (int v : free_vars(d.children[0].seq))
      if (!lo.count(v)) acc.push_back(v);
  }
  for (const auto& c : d.children) collect_exl_paths(c, acc, out);
  acc.resize(mark);
}

}  // namespace detail

inline void compute_values(const StagedTree& t, std::vector<int>& val);

// A node can still influence the root value only while neither it nor any
// ancestor is settled; everything under a settled node is dead weight.
inline std::vector<bool> live_nodes(const StagedTree& t) {
  std::vector<int> val;
  compute_values(t, val);
  std::vector<bool> live(t.nodes.size(), false);
  for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id) {
    int p = t.nodes[id].parent;
    live[id] = (p < 0 || live[p]) && val[id] == -1;
  }
  return live;
}

// One conjunctive stage: expand every pending and-leaf with its Tr
// deduction under (depth, FV-along-continued-paths) instantiation.
inline void run_and_stage(StagedTree& t) {
  std::vector<bool> live = live_nodes(t);
  std::vector<int> pending;
  for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id)
    if (live[id] && !t.nodes[id].expanded && t.nodes[id].gate == Gate::And)
      pending.push_back(id);
  for (int id : pending) {
    if (static_cast<int>(t.nodes.size()) > t.max_nodes) {
      t.exhausted = true;
      return;
    }
    TrContext ctx = detail::staged_ctx(t);
    ctx.set_stage(t.nodes[id].depth, t.fv_sub(id));
    DeductionTree ded = build_tr(t.nodes[id].seq, ctx);
    // copy the leaf sequents out: creating sons reallocates the arena
    std::vector<Sequent> leaves;
    {
      std::vector<const DeductionTree*> ptrs;
      collect_leaves(ded, ptrs);
      for (const DeductionTree* p : ptrs) leaves.push_back(p->seq);
    }
    std::vector<std::vector<int>> exl;
    {
      std::vector<int> acc;
      detail::collect_exl_paths(ded, acc, exl);
    }
    t.stats.deduction_nodes += deduction_node_count(ded);
    t.nodes[id].ded = std::move(ded);
    t.nodes[id].exl_vars = std::move(exl);
    t.nodes[id].expanded = true;
    for (size_t i = 0; i < leaves.size(); ++i) {
      Gate g = detail::classify(leaves[i], ctx, Gate::Or);
      if (g == Gate::Or) assert(is_non_invertible(leaves[i], ctx));
      int son = detail::add_node(t, leaves[i], id, static_cast<int>(i), g);
      t.nodes[id].sons.push_back(son);
      // classification parameters for the son's own branching stage
      t.nodes[son].stage_n = t.nodes[id].depth;
      t.nodes[son].stage_A = ctx.A;
    }
  }
}

// One disjunctive stage: expand every pending or-leaf with the branching
// rule.  Sons of the branching are classified with an empty term slice
// (fully analyzed is an absolute notion).
inline void run_or_stage(StagedTree& t) {
  std::vector<bool> live = live_nodes(t);
  std::vector<int> pending;
  for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id)
    if (live[id] && !t.nodes[id].expanded && t.nodes[id].gate == Gate::Or)
      pending.push_back(id);
  for (int id : pending) {
    if (static_cast<int>(t.nodes.size()) > t.max_nodes) {
      t.exhausted = true;
      return;
    }
    TrContext ctx = detail::staged_ctx(t);
    ctx.set_stage(t.nodes[id].stage_n, t.nodes[id].stage_A);
    Branching br = branch_rule(t.nodes[id].seq, ctx);
    TrContext leafctx = detail::staged_ctx(t);  // empty term slice
    t.nodes[id].expanded = true;
    std::vector<std::pair<Sequent, int>> slots;  // sequent, component
    int comp = 0;
    if (br.continued) {
      slots.emplace_back(*br.continued, comp);
    } else {
      t.nodes[id].sons.push_back(-1);  // slot 0 reserved for the continued
    }
    ++comp;
    for (const auto& u : br.uppers) slots.emplace_back(u.seq, comp++);
    t.nodes[id].br = std::move(br);
    for (auto& [seq, c] : slots) {
      Gate g = detail::classify(seq, leafctx, Gate::And);
      bool loop = g == Gate::And && detail::repeats_ancestor(t, seq, id);
      if (loop) g = Gate::Zero;
      int son = detail::add_node(t, std::move(seq), id, c, g);
      t.nodes[son].loop = loop;
      t.nodes[id].sons.push_back(son);
    }
    t.nodes[id].ded = branching_deduction(t.nodes[id].seq, t.nodes[id].br);
  }
}

// Gate value propagated through the truncation: 1/0 where settled, -1
// where the truncation leaves it open.
inline void compute_values(const StagedTree& t, std::vector<int>& val) {
  val.assign(t.nodes.size(), -1);
  // sons always have larger ids, so a reverse sweep is bottom-up
  for (int id = static_cast<int>(t.nodes.size()) - 1; id >= 0; --id) {
    const TRNode& n = t.nodes[id];
    if (n.gate == Gate::One) {
      val[id] = 1;
    } else if (n.gate == Gate::Zero) {
      val[id] = 0;
    } else if (n.expanded) {
      bool all1 = true, all0 = true, any1 = false, any0 = false;
      for (int s : n.sons) {
        int v = s < 0 ? -2 : val[s];
        if (v == -2) continue;  // absent continued slot
        all1 &= v == 1;
        all0 &= v == 0;
        any1 |= v == 1;
        any0 |= v == 0;
      }
      if (n.gate == Gate::And) val[id] = any0 ? 0 : all1 ? 1 : -1;
      if (n.gate == Gate::Or) val[id] = any1 ? 1 : all0 ? 0 : -1;
    }
  }
}

inline StagedTree build_staged(const Sequent& input, int depth_budget,
                               int max_nodes = 200000) {
  StagedTree t;
  t.s0 = mark_all(input);
  t.sig = signature_of(t.s0);
  t.max_nodes = max_nodes;
  t.root_fv = free_vars(t.s0);
  if (t.root_fv.empty()) t.root_fv.insert(0);
  int next = 1;
  for (int v : t.root_fv)
    if (v + 1 > next) next = v + 1;
  t.ledger.reserve_at_least(next);
  TrContext ctx = detail::staged_ctx(t);  // empty slice: root classification
  detail::add_node(t, t.s0, -1, -1, detail::classify(t.s0, ctx, Gate::And));
  std::vector<int> val;
  for (int n = 0; n <= depth_budget; ++n) {
    std::vector<bool> live = live_nodes(t);
    bool pending = false;
    for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id)
      pending |= live[id] && !t.nodes[id].expanded &&
                 (t.nodes[id].gate == Gate::And ||
                  t.nodes[id].gate == Gate::Or);
    if (!pending || t.exhausted) break;
    if (n % 2 == 0)
      run_and_stage(t);
    else
      run_or_stage(t);
    t.stats.stages = n + 1;
    compute_values(t, val);
    if (val[0] != -1) break;  // the root value settled
  }
  return t;
}

// ---------------------------------------------------------------------------
// Derivation extraction (root value 1).

namespace detail {

inline DeductionTree staged_extract(const StagedTree& t,
                                    const std::vector<int>& val, int id) {
  const TRNode& n = t.nodes[id];
  assert(val[id] == 1);
  if (n.gate == Gate::One) {
    DeductionTree d;
    d.seq = n.seq;
    bool has_bot = false;
    for (const auto& [f, m] : n.seq.antecedent)
      if (f.is_bottom()) has_bot = true;
    d.rule = has_bot ? Rule::AxiomBot : Rule::AxiomT;
    return d;
  }
  if (n.gate == Gate::And) {
    DeductionTree d = n.ded;
    std::vector<DeductionTree*> leaves;
    collect_leaves(d, leaves);
    assert(leaves.size() == n.sons.size());
    for (size_t i = 0; i < leaves.size(); ++i)
      *leaves[i] = staged_extract(t, val, n.sons[i]);
    return d;
  }
  assert(n.gate == Gate::Or);
  for (size_t slot = 0; slot < n.sons.size(); ++slot) {
    int s = n.sons[slot];
    if (s < 0 || val[s] != 1) continue;
    DeductionTree d;
    d.seq = n.seq;
    d.rule = slot == 0 ? Rule::Circ : n.br.uppers[slot - 1].rule;
    d.children.push_back(staged_extract(t, val, s));
    return d;
  }
  assert(false && "value 1 or-node has a value 1 son");
  return {};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Countermodel evidence: a closed selected subtree.  At every and-node one
// refuted son, at every or-node all sons (the continued one keeps the
// truncation sets growing, the arms provide the witness extensions), all
// leaves fully analyzed.  Selection fails on any open leaf, which makes
// the whole verdict Unknown.

struct SelectedTree {
  std::vector<int> members;            // arena ids, root first
  std::map<int, int> chosen_son;       // and-node id -> chosen son id
};

namespace detail {

inline bool select_subtree(const StagedTree& t, const std::vector<int>& val,
                           int id, SelectedTree& out) {
  const TRNode& n = t.nodes[id];
  if (val[id] == 1) return false;
  out.members.push_back(id);
  if (n.gate == Gate::Zero) return true;
  if (n.gate == Gate::One) return false;
  if (!n.expanded) return false;  // open leaf: no finite evidence
  if (n.gate == Gate::And) {
    for (int s : n.sons) {
      if (val[s] == 1) continue;
      size_t mark = out.members.size();
      if (select_subtree(t, val, s, out)) {
        out.chosen_son[id] = s;
        return true;
      }
      out.members.resize(mark);
    }
    return false;
  }
  for (int s : n.sons) {
    if (s < 0) continue;
    if (!select_subtree(t, val, s, out)) return false;
  }
  return true;
}

}  // namespace detail

// Truncation sets over a selected subtree, per node.
struct TruncationSets {
  std::set<Formula> gamma_inf;      // antecedent union along continued paths
  std::set<Formula> gamma_inf_sub;  // including all ancestors
  std::set<Formula> delta_inf;
  std::set<int> fv_inf;
  std::set<int> fv_inf_sub;
};

inline std::map<int, TruncationSets> truncation_sets(const StagedTree& t,
                                                     const SelectedTree& sel) {
  std::map<int, TruncationSets> out;
  std::set<int> in_t(sel.members.begin(), sel.members.end());
  for (int sigma : sel.members) {
    TruncationSets ts;
    for (int rho : sel.members) {
      if (!t.cont_extends(sigma, rho)) continue;
      // within the selected tree an and-node contributes only its chosen
      // son; other sons are not members, so membership already filters
      ErasedSequent e = erase_marks(t.nodes[rho].seq);
      ts.gamma_inf.insert(e.antecedent.begin(), e.antecedent.end());
      ts.delta_inf.insert(e.succedent.begin(), e.succedent.end());
      std::set<int> fv = t.node_fv(rho);
      ts.fv_inf.insert(fv.begin(), fv.end());
    }
    out.emplace(sigma, std::move(ts));
  }
  for (int sigma : sel.members) {
    TruncationSets& ts = out.at(sigma);
    for (int tau = sigma; tau != -1; tau = t.nodes[tau].parent) {
      if (!in_t.count(tau)) continue;
      const TruncationSets& up = out.at(tau);
      ts.gamma_inf_sub.insert(up.gamma_inf.begin(), up.gamma_inf.end());
      ts.fv_inf_sub.insert(up.fv_inf.begin(), up.fv_inf.end());
    }
  }
  return out;
}

// The closed-evidence criterion: the truncation pair at every node is
// analyzed outright (no pending instantiation demands), succedent
// implications and universals have their witness extensions inside the
// subtree, and no atom is shared between the antecedent and succedent
// unions.  Sound but conservative: branches that keep a universal
// antecedent or existential succedent formula alive never close, and
// such inputs come out Unknown.
inline std::optional<std::string> check_countermodel_conditions(
    const StagedTree& t, const SelectedTree& sel,
    const std::map<int, TruncationSets>& ts_map) {
  auto fail = [&](int sigma, const std::string& why) {
    return "node " + std::to_string(sigma) + ": " + why;
  };
  for (int sigma : sel.members) {
    const TruncationSets& ts = ts_map.at(sigma);
    for (const Formula& f : ts.gamma_inf_sub) {
      if (f.is_bottom()) return fail(sigma, "bottom in antecedent union");
      if (f.is_atomic() && ts.delta_inf.count(f))
        return fail(sigma, "common atomic formula " + to_string(f));
      switch (f.kind) {
        case Formula::Kind::Or:
          if (!ts.gamma_inf_sub.count(f.left()) &&
              !ts.gamma_inf_sub.count(f.right()))
            return fail(sigma, "unanalyzed antecedent disjunction");
          break;
        case Formula::Kind::And:
          if (!ts.gamma_inf_sub.count(f.left()) ||
              !ts.gamma_inf_sub.count(f.right()))
            return fail(sigma, "unanalyzed antecedent conjunction");
          break;
        case Formula::Kind::Implies:
          if (!ts.delta_inf.count(f.left()) &&
              !ts.gamma_inf_sub.count(f.right()))
            return fail(sigma, "unanalyzed antecedent implication");
          break;
        case Formula::Kind::Exists: {
          bool witnessed = !mentions_bound(f.body(), f.var) &&
                           ts.gamma_inf_sub.count(f.body());
          for (int a : ts.fv_inf_sub)
            witnessed |=
                ts.gamma_inf_sub.count(instantiate(f, Term::free(a))) != 0;
          if (!witnessed)
            return fail(sigma, "unwitnessed antecedent existential");
          break;
        }
        case Formula::Kind::Forall:
          // a universal antecedent formula demands every term of a
          // domain that cannot be exhausted by a finite truncation
          return fail(sigma, "pending universal antecedent formula");
        default:
          break;
      }
    }
    for (const Formula& f : ts.delta_inf) {
      switch (f.kind) {
        case Formula::Kind::Or:
          if (!ts.delta_inf.count(f.left()) || !ts.delta_inf.count(f.right()))
            return fail(sigma, "unanalyzed succedent disjunction");
          break;
        case Formula::Kind::And:
          if (!ts.delta_inf.count(f.left()) && !ts.delta_inf.count(f.right()))
            return fail(sigma, "unanalyzed succedent conjunction");
          break;
        case Formula::Kind::Exists:
          return fail(sigma, "pending existential succedent formula");
        case Formula::Kind::Implies: {
          bool ok = false;
          for (int tau : sel.members)
            if (t.is_ancestor(sigma, tau) &&
                ts_map.at(tau).gamma_inf_sub.count(f.left()) &&
                ts_map.at(tau).delta_inf.count(f.right()))
              ok = true;
          if (!ok)
            return fail(sigma, "succedent implication without witness world");
          break;
        }
        case Formula::Kind::Forall: {
          bool ok = false;
          for (int tau : sel.members) {
            if (!t.is_ancestor(sigma, tau)) continue;
            const TruncationSets& tt = ts_map.at(tau);
            for (int a : tt.fv_inf_sub)
              if (tt.delta_inf.count(instantiate(f, Term::free(a)))) ok = true;
          }
          if (!ok)
            return fail(sigma, "succedent universal without witness instance");
          break;
        }
        default:
          break;
      }
    }
  }
  return std::nullopt;
}

// Kripke model read off the selected subtree: worlds are its nodes under
// the tree order, the domain of a world is the free-variable slice of its
// truncation sets plus the subterms of its facts.
inline PredCountermodelBuild build_model_from_subtree(
    const StagedTree& t, const SelectedTree& sel,
    const std::map<int, TruncationSets>& ts_map) {
  PredCountermodelBuild out;
  std::map<int, int> world_of;
  for (int sigma : sel.members) {
    int w = static_cast<int>(out.world_seqs.size());
    world_of[sigma] = w;
    out.world_seqs.push_back(t.nodes[sigma].seq);
    const TruncationSets& ts = ts_map.at(sigma);
    std::set<Term> dom;
    for (int v : ts.fv_inf_sub) dom.insert(Term::free(v));
    std::set<Formula> facts;
    for (const Formula& f : ts.gamma_inf_sub)
      if (f.is_atomic()) {
        facts.insert(f);
        for (const auto& a : f.args) detail::collect_subterms(a, dom);
      }
    out.model.domain.emplace_back(dom.begin(), dom.end());
    out.model.facts.push_back(std::move(facts));
  }
  int n = static_cast<int>(sel.members.size());
  out.model.le.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.model.le[world_of.at(sel.members[i])][world_of.at(sel.members[j])] =
          t.is_ancestor(sel.members[i], sel.members[j]);
  out.model.root = world_of.at(sel.members.front());
  return out;
}

// ---------------------------------------------------------------------------

enum class Verdict { Derivable, Underivable, Unknown };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Derivable: return "derivable";
    case Verdict::Underivable: return "underivable";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

struct FullResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<DeductionTree> derivation;       // marks erased
  std::optional<PredCountermodelBuild> model;
  std::optional<SelectedTree> selection;
  std::string note;  // why the verdict stayed Unknown
  StagedStats stats;
};

inline FullResult decide_full_on(StagedTree& t) {
  FullResult res;
  res.stats = t.stats;
  std::vector<int> val;
  compute_values(t, val);
  if (val[0] == 1) {
    res.verdict = Verdict::Derivable;
    res.derivation = erase_derivation(detail::staged_extract(t, val, 0));
    return res;
  }
  if (t.exhausted) {
    res.note = "node budget exhausted";
    return res;
  }
  SelectedTree sel;
  if (!detail::select_subtree(t, val, 0, sel)) {
    res.note = "no closed refuting subtree within the depth budget";
    return res;
  }
  auto ts_map = truncation_sets(t, sel);
  if (auto err = check_countermodel_conditions(t, sel, ts_map)) {
    res.note = "closed subtree fails countermodel conditions: " + *err;
    return res;
  }
  PredCountermodelBuild cm = build_model_from_subtree(t, sel, ts_map);
  if (auto verr = validate(cm.model)) {
    res.note = "extracted model invalid: " + *verr;
    return res;
  }
  if (!falsifies(cm.model, t.s0)) {
    res.note = "extracted model does not falsify the root";
    return res;
  }
  res.verdict = Verdict::Underivable;
  res.model = std::move(cm);
  res.selection = std::move(sel);
  return res;
}

inline FullResult decide_full(const Sequent& input, int depth_budget,
                              int max_nodes = 200000) {
  StagedTree t = build_staged(input, depth_budget, max_nodes);
  FullResult r = decide_full_on(t);
  r.stats = t.stats;
  return r;
}

}  // namespace seqcalc
