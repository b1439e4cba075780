#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqcalc/staged.hpp"

namespace seqcalc {

// Transfer transformation on staged trees.  A marked atom sitting in the
// antecedent on the continued side of a branching node rho, with the same
// atom marked in a succedent across one of rho's arms, lets the proof of
// the arm be replayed higher up: rho collapses to a re-marking step and
// the branching reappears at the antecedent occurrence, where the
// offending arm closes by axiom.  Repeating this removes all such pairs.

struct TransferablePair {
  int rho = -1;     // infimum, a branching node
  int sigma0 = -1;  // branching node on rho's continued side, alpha in antecedent
  int sigma1 = -1;  // node across an arm of rho, alpha in succedent
  Formula atom;
};

struct GateChange {
  int node = -1;
  Gate from = Gate::And;
  Gate to = Gate::And;
};

namespace detail {

inline std::vector<bool> reachable_nodes(const StagedTree& t) {
  std::vector<bool> seen(t.nodes.size(), false);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (id < 0 || seen[id]) continue;
    seen[id] = true;
    for (int s : t.nodes[id].sons) stack.push_back(s);
  }
  return seen;
}

inline void recompute_depths(StagedTree& t) {
  std::vector<int> stack{0};
  t.nodes[0].depth = 0;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    for (int s : t.nodes[id].sons) {
      if (s < 0) continue;
      t.nodes[s].depth = t.nodes[id].depth + 1;
      stack.push_back(s);
    }
  }
}

inline int son_by_component(const StagedTree& t, int id, int comp) {
  for (int s : t.nodes[id].sons)
    if (s >= 0 && t.nodes[s].component == comp) return s;
  return -1;
}

}  // namespace detail

// All transferable pairs of the tree, infima of least depth first.
inline std::vector<TransferablePair> find_transferable_pairs(
    const StagedTree& t) {
  std::vector<TransferablePair> out;
  std::vector<bool> seen = detail::reachable_nodes(t);
  for (int s0 = 0; s0 < static_cast<int>(t.nodes.size()); ++s0) {
    const TRNode& n0 = t.nodes[s0];
    if (!seen[s0] || n0.made != Gate::Or || !n0.expanded || n0.circ) continue;
    std::vector<Formula> atoms;
    for (const auto& [f, m] : n0.seq.antecedent)
      if (m && f.is_atomic()) atoms.push_back(f);
    if (atoms.empty()) continue;
    for (int s1 = 0; s1 < static_cast<int>(t.nodes.size()); ++s1) {
      if (!seen[s1] || s1 == s0) continue;
      const TRNode& n1 = t.nodes[s1];
      for (const Formula& a : atoms) {
        if (!n1.seq.succedent.contains_marked(a)) continue;
        // infimum of s0 and s1
        std::set<int> anc;
        for (int x = s0; x != -1; x = t.nodes[x].parent) anc.insert(x);
        int rho = s1;
        while (rho != -1 && !anc.count(rho)) rho = t.nodes[rho].parent;
        if (rho == -1 || rho == s0 || rho == s1) continue;
        const TRNode& r = t.nodes[rho];
        if (r.made != Gate::Or || !r.expanded || r.circ) continue;
        if (!t.cont_extends(rho, s0)) continue;
        // first component of the path rho -> s1 must leave the continued slot
        int top1 = s1;
        while (t.nodes[top1].parent != rho) top1 = t.nodes[top1].parent;
        if (t.nodes[top1].component == 0) continue;
        out.push_back({rho, s0, s1, a});
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    auto key = [&](const TransferablePair& p) {
      return std::tuple(t.nodes[p.rho].depth, p.rho, p.sigma0, p.sigma1);
    };
    return key(a) < key(b);
  });
  return out;
}

namespace detail {

inline int copy_subtree(StagedTree& t, int src) {
  TRNode n = t.nodes[src];
  std::vector<int> src_sons = n.sons;
  n.sons.clear();
  t.nodes.push_back(std::move(n));
  int id = static_cast<int>(t.nodes.size()) - 1;
  for (int s : src_sons) {
    if (s < 0) {
      t.nodes[id].sons.push_back(-1);
      continue;
    }
    int c = copy_subtree(t, s);
    t.nodes[c].parent = id;
    t.nodes[id].sons.push_back(c);
  }
  t.stats.node_count = static_cast<int>(t.nodes.size());
  return id;
}

inline void weaken_sequent(Sequent& s, const Cedent& gamma,
                           const Cedent& delta) {
  for (const auto& [f, m] : gamma) s.antecedent.insert(f, m);
  for (const auto& [f, m] : delta) s.succedent.insert(f, m);
}

inline void weaken_ded(DeductionTree& d, const Cedent& gamma,
                       const Cedent& delta) {
  weaken_sequent(d.seq, gamma, delta);
  for (auto& c : d.children) weaken_ded(c, gamma, delta);
}

// Weakening by side cedents, pushed along the subtree.  Branching arms
// only tolerate extra marked atoms: the schema determines their sequents
// from the non-remainder part of the lower one, so general side formulas
// stay on the lower sequent and the continued branch.
inline void weaken_subtree(StagedTree& t, int id, const Cedent& gamma,
                           const Cedent& delta, bool into_arms) {
  TRNode& n = t.nodes[id];
  weaken_sequent(n.seq, gamma, delta);
  if (n.expanded && n.made == Gate::And) {
    weaken_ded(n.ded, gamma, delta);
    for (int s : n.sons) weaken_subtree(t, s, gamma, delta, into_arms);
    return;
  }
  if (n.expanded && n.made == Gate::Or) {
    weaken_sequent(n.ded.seq, gamma, delta);
    size_t child = 0;
    if (n.sons[0] >= 0) {
      weaken_sequent(n.ded.children[0].seq, gamma, delta);
      if (n.br.continued) weaken_sequent(*n.br.continued, gamma, delta);
      ++child;
    }
    if (into_arms) {
      for (; child < n.ded.children.size(); ++child)
        weaken_sequent(n.ded.children[child].seq, gamma, delta);
      for (auto& u : n.br.uppers) weaken_sequent(u.seq, gamma, delta);
    }
    for (size_t slot = 0; slot < n.sons.size(); ++slot) {
      int s = n.sons[slot];
      if (s < 0) continue;
      if (slot == 0 || into_arms) weaken_subtree(t, s, gamma, delta, into_arms);
    }
  }
}

inline void collect_subtree_vars(const StagedTree& t, int id,
                                 std::set<int>& out) {
  const TRNode& n = t.nodes[id];
  std::set<int> fv = free_vars(n.seq);
  out.insert(fv.begin(), fv.end());
  for (const auto& u : n.br.uppers)
    if (u.eigenvariable >= 0) out.insert(u.eigenvariable);
  for (const auto& path : n.exl_vars) out.insert(path.begin(), path.end());
  for (int s : n.sons)
    if (s >= 0) collect_subtree_vars(t, s, out);
}

inline void rename_sequent(Sequent& s, const std::map<int, int>& ren) {
  Sequent r;
  for (const auto& [f, m] : s.antecedent)
    r.antecedent.insert(rename_free(f, ren), m);
  for (const auto& [f, m] : s.succedent)
    r.succedent.insert(rename_free(f, ren), m);
  s = std::move(r);
}

inline void rename_ded(DeductionTree& d, const std::map<int, int>& ren) {
  rename_sequent(d.seq, ren);
  for (auto& c : d.children) rename_ded(c, ren);
}

inline void rename_subtree(StagedTree& t, int id,
                           const std::map<int, int>& ren) {
  TRNode& n = t.nodes[id];
  rename_sequent(n.seq, ren);
  rename_ded(n.ded, ren);
  if (n.br.continued) rename_sequent(*n.br.continued, ren);
  for (auto& u : n.br.uppers) {
    rename_sequent(u.seq, ren);
    u.principal = rename_free(u.principal, ren);
    auto it = ren.find(u.eigenvariable);
    if (it != ren.end()) u.eigenvariable = it->second;
  }
  for (auto& path : n.exl_vars)
    for (auto& v : path) {
      auto it = ren.find(v);
      if (it != ren.end()) v = it->second;
    }
  std::set<int> a2;
  for (int v : n.stage_A) {
    auto it = ren.find(v);
    a2.insert(it == ren.end() ? v : it->second);
  }
  n.stage_A = std::move(a2);
  for (int s : n.sons)
    if (s >= 0) rename_subtree(t, s, ren);
}

}  // namespace detail

// One transfer step.  rho collapses to a re-marking inference over a copy
// of its continued subtree weakened by rho's own cedents; the branching
// moves to sigma0's copy in there, whose continued son is a second,
// eigenvariable-renamed copy and whose arms are copies of rho's arms.
// The arm towards sigma1 absorbs the marked atom and closes by axiom at
// sigma1's position.
inline void transfer_step(StagedTree& t, const TransferablePair& p) {
  const Sequent s_rho = t.nodes[p.rho].seq;
  const Sequent s_sigma0 = t.nodes[p.sigma0].seq;
  const int cont = t.nodes[p.rho].sons[0];
  assert(cont >= 0);
  const Sequent s_cont = t.nodes[cont].seq;
  const Branching rho_br = t.nodes[p.rho].br;
  const std::vector<int> rho_sons = t.nodes[p.rho].sons;

  // component paths: rho*(0) down to sigma0, and within the arm to sigma1
  std::vector<int> k0;
  for (int x = p.sigma0; x != cont; x = t.nodes[x].parent)
    k0.push_back(t.nodes[x].component);
  std::reverse(k0.begin(), k0.end());
  int top1 = p.sigma1;
  while (t.nodes[top1].parent != p.rho) top1 = t.nodes[top1].parent;
  const int arm_comp = t.nodes[top1].component;
  std::vector<int> k1;
  for (int x = p.sigma1; x != top1; x = t.nodes[x].parent)
    k1.push_back(t.nodes[x].component);
  std::reverse(k1.begin(), k1.end());

  // weakened copy of the continued subtree, carrying rho's cedents
  int w0 = detail::copy_subtree(t, cont);
  detail::weaken_subtree(t, w0, s_rho.antecedent, s_rho.succedent, false);
  int x = w0;
  for (int c : k0) x = detail::son_by_component(t, x, c);
  assert(x >= 0);

  // renamed copy for the new continued son: every variable not free in
  // the original continued sequent is an eigenvariable of the copy and
  // gets a globally fresh name
  int w1 = detail::copy_subtree(t, cont);
  {
    std::set<int> vars;
    detail::collect_subtree_vars(t, w1, vars);
    std::map<int, int> ren;
    for (int v : vars)
      if (!free_vars(s_cont).count(v)) ren.emplace(v, t.ledger.fresh());
    if (!ren.empty()) detail::rename_subtree(t, w1, ren);
  }
  detail::weaken_subtree(t, w1, s_sigma0.antecedent, s_sigma0.succedent,
                         false);

  // arm copies; the one towards sigma1 absorbs the atom and closes
  Cedent atom_only;
  atom_only.insert(p.atom, true);
  std::vector<int> arms;
  for (size_t slot = 1; slot < rho_sons.size(); ++slot) {
    int a = detail::copy_subtree(t, rho_sons[slot]);
    if (t.nodes[a].component == arm_comp) {
      detail::weaken_subtree(t, a, atom_only, Cedent(), true);
      int y = a;
      for (int c : k1) y = detail::son_by_component(t, y, c);
      assert(y >= 0);
      TRNode& ax = t.nodes[y];
      assert(is_axiom(ax.seq));
      ax.gate = Gate::One;
      ax.loop = false;
      ax.sons.clear();
      ax.br = Branching();
      ax.ded = DeductionTree();
      ax.ded.seq = ax.seq;
      ax.expanded = true;
      ax.exl_vars.clear();
    }
    arms.push_back(a);
  }

  // sigma0's copy becomes the new branching node
  {
    TRNode& X = t.nodes[x];
    X.sons.clear();
    X.sons.push_back(w1);
    t.nodes[w1].parent = x;
    t.nodes[w1].component = 0;
    X.br = Branching();
    X.br.continued = t.nodes[w1].seq;
    for (size_t i = 0; i < arms.size(); ++i) {
      int a = arms[i];
      t.nodes[a].parent = x;
      X.sons.push_back(a);
      BranchUpper u = rho_br.uppers[i];
      u.seq = t.nodes[a].seq;
      X.br.uppers.push_back(std::move(u));
    }
    X.ded = branching_deduction(X.seq, X.br);
    X.expanded = true;
  }

  // rho collapses to the re-marking step over w0
  {
    TRNode& R = t.nodes[p.rho];
    R.sons.assign(1, w0);
    t.nodes[w0].parent = p.rho;
    t.nodes[w0].component = 0;
    R.br = Branching();
    R.circ = true;
    R.ded = DeductionTree();
    R.ded.seq = R.seq;
    R.ded.rule = Rule::Circ;
    DeductionTree up;
    up.seq = t.nodes[w0].seq;
    R.ded.children.push_back(std::move(up));
    R.expanded = true;
  }

  detail::recompute_depths(t);
  t.rebuild_fv_cont();
}

// Gate updates after surgery, per the monotone change discipline: a
// branching node settles to 1 on any settled-1 son and to 0 when all sons
// settle to 0; a conjunctive node dually.  Settled gates never move.
inline std::vector<GateChange> recompute_gates(StagedTree& t) {
  std::vector<GateChange> changes;
  std::vector<bool> seen = detail::reachable_nodes(t);
  bool moved = true;
  while (moved) {
    moved = false;
    for (int id = static_cast<int>(t.nodes.size()) - 1; id >= 0; --id) {
      if (!seen[id]) continue;
      TRNode& n = t.nodes[id];
      if (!n.expanded || (n.gate != Gate::Or && n.gate != Gate::And)) continue;
      bool all1 = true, all0 = true, any1 = false, any0 = false, absent = true;
      for (int s : n.sons) {
        if (s < 0) continue;
        absent = false;
        Gate g = t.nodes[s].gate;
        all1 &= g == Gate::One;
        all0 &= g == Gate::Zero;
        any1 |= g == Gate::One;
        any0 |= g == Gate::Zero;
      }
      if (absent) continue;
      Gate next = n.gate;
      if (n.gate == Gate::Or) next = any1 ? Gate::One : all0 ? Gate::Zero : n.gate;
      if (n.gate == Gate::And) next = any0 ? Gate::Zero : all1 ? Gate::One : n.gate;
      if (next != n.gate) {
        changes.push_back({id, n.gate, next});
        n.gate = next;
        moved = true;
      }
    }
  }
  return changes;
}

// The eigenvariable discipline at tree granularity: a variable introduced
// at a node (exists-left within a Tr, or a forall-right arm) may occur
// only above its introduction or in a later component of a common
// branching, and no variable is introduced twice.
inline std::optional<std::string> audit_eigenvariables(const StagedTree& t) {
  std::vector<bool> seen = detail::reachable_nodes(t);
  std::map<int, std::vector<int>> intro;  // var -> introduction nodes
  for (int id = 0; id < static_cast<int>(t.nodes.size()); ++id) {
    if (!seen[id]) continue;
    const TRNode& n = t.nodes[id];
    if (n.made == Gate::And && n.expanded) {
      for (size_t i = 0; i < n.exl_vars.size() && i < n.sons.size(); ++i)
        for (int v : n.exl_vars[i]) intro[v].push_back(n.sons[i]);
    }
    if (n.made == Gate::Or && n.expanded && !n.circ) {
      for (size_t j = 0; j < n.br.uppers.size(); ++j)
        if (n.br.uppers[j].rule == Rule::AllR) {
          int s = detail::son_by_component(t, id, static_cast<int>(j) + 1);
          if (s >= 0) intro[n.br.uppers[j].eigenvariable].push_back(s);
        }
    }
  }
  // distinctness: all introduction nodes of one variable are siblings
  // (one exists-left can sit below several Tr leaves)
  for (const auto& [v, nodes] : intro) {
    for (int nd : nodes)
      if (t.nodes[nd].parent != t.nodes[nodes.front()].parent)
        return "variable a" + std::to_string(v) + " introduced twice";
  }
  auto above_or_right = [&](int nu, int tau) {
    if (t.is_ancestor(nu, tau)) return true;
    // common ancestor with nu in an earlier component than tau
    std::map<int, int> comp_at;  // ancestor -> component taken towards nu
    for (int x = nu; t.nodes[x].parent != -1; x = t.nodes[x].parent)
      comp_at[t.nodes[x].parent] = t.nodes[x].component;
    for (int x = tau; t.nodes[x].parent != -1; x = t.nodes[x].parent) {
      auto it = comp_at.find(t.nodes[x].parent);
      if (it != comp_at.end())
        return it->second < t.nodes[x].component;
    }
    return false;
  };
  for (int tau = 0; tau < static_cast<int>(t.nodes.size()); ++tau) {
    if (!seen[tau]) continue;
    for (int v : free_vars(t.nodes[tau].seq)) {
      auto it = intro.find(v);
      if (it == intro.end()) continue;  // root variable or term-slice seed
      bool ok = false;
      for (int nu : it->second) ok = ok || above_or_right(nu, tau);
      if (!ok)
        return "variable a" + std::to_string(v) + " occurs at node " +
               std::to_string(tau) + " outside its scope";
    }
  }
  return std::nullopt;
}

struct TransferOutcome {
  int steps = 0;
  bool fixpoint = false;
  std::vector<GateChange> changes;
  std::optional<std::string> audit_error;
};

// Iterate minimal transfer steps until no pair has its infimum within
// `depth_limit`.  Exhausting all pairs outright is hopeless: each step can
// spawn new pairs in the copied subtrees, only ever at strictly deeper
// infima, so only the levels up to a fixed depth stabilize.
inline TransferOutcome transfer_to_fixpoint(StagedTree& t, int depth_limit,
                                            int max_steps = 64) {
  TransferOutcome out;
  while (out.steps < max_steps) {
    auto pairs = find_transferable_pairs(t);
    std::erase_if(pairs, [&](const TransferablePair& p) {
      return t.nodes[p.rho].depth > depth_limit;
    });
    if (pairs.empty()) {
      out.fixpoint = true;
      break;
    }
    transfer_step(t, pairs.front());
    ++out.steps;
    auto ch = recompute_gates(t);
    out.changes.insert(out.changes.end(), ch.begin(), ch.end());
    out.audit_error = audit_eigenvariables(t);
    if (out.audit_error) break;
  }
  return out;
}

}  // namespace seqcalc
