#pragma once

#include <string>
#include <vector>

#include "seqcalc/staged.hpp"

namespace seqcalc {

namespace detail {

inline void collect_quant_names(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall)
    out.insert(f.var);
  for (const auto& s : f.sub) collect_quant_names(s, out);
}

inline Term bound_for_free(const Term& t, int var, const std::string& name) {
  if (t.kind == Term::Kind::Free && t.index == var) return Term::bound(name);
  if (t.kind == Term::Kind::App) {
    Term r = t;
    for (auto& a : r.args) a = bound_for_free(a, var, name);
    return r;
  }
  return t;
}

inline Formula bound_for_free(const Formula& f, int var,
                              const std::string& name) {
  Formula r = f;
  for (auto& a : r.args) a = bound_for_free(a, var, name);
  for (auto& s : r.sub) s = bound_for_free(s, var, name);
  return r;
}

}  // namespace detail

// Universal closure over one free variable, choosing a bound name unused
// by any quantifier of the formula.
inline Formula bind_universal(const Formula& f, int var) {
  std::set<std::string> used;
  detail::collect_quant_names(f, used);
  std::string name = "x";
  for (int k = 0; used.count(name); ++k) name = "x" + std::to_string(k);
  return Formula::forall(name, detail::bound_for_free(f, var, name));
}

inline Formula bind_universal(Formula f, const std::vector<int>& vars) {
  // innermost-first so the outermost binder covers the first variable
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    f = bind_universal(f, *it);
  return f;
}

// The connective-merging operator: pushing a disjunct under a universally
// bound implication.  A bare implication counts as universally bound with
// an empty prefix.  Bound names never capture into beta, whose bound
// occurrences are all closed by its own quantifiers.
inline Formula oplus(const Formula& alpha, const Formula& beta) {
  std::vector<std::string> prefix;
  const Formula* core = &alpha;
  while (core->kind == Formula::Kind::Forall) {
    prefix.push_back(core->var);
    core = &core->sub[0];
  }
  if (core->kind != Formula::Kind::Implies)
    return Formula::disj(alpha, beta);
  Formula out = Formula::implies(core->left(),
                                 Formula::disj(core->right(), beta));
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    out = Formula::forall(*it, std::move(out));
  return out;
}

inline Formula oplus_chain(const std::vector<Formula>& alphas,
                           const Formula& beta) {
  Formula out = beta;
  for (auto it = alphas.rbegin(); it != alphas.rend(); ++it)
    out = oplus(*it, out);
  return out;
}

inline Formula big_conj(const std::set<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula out = *fs.begin();
  for (auto it = std::next(fs.begin()); it != fs.end(); ++it)
    out = Formula::conj(out, *it);
  return out;
}

inline Formula big_disj(const std::set<Formula>& fs) {
  if (fs.empty()) return Formula::bottom();
  Formula out = *fs.begin();
  for (auto it = std::next(fs.begin()); it != fs.end(); ++it)
    out = Formula::disj(out, *it);
  return out;
}

// The sequent read as a formula.
inline Formula chi(const Sequent& s) {
  ErasedSequent e = erase_marks(s);
  return Formula::implies(big_conj(e.antecedent), big_disj(e.succedent));
}

// Characteristic formula of a node of a selected subtree: leaves
// contribute their sequent formula, a conjunctive node universally closes
// over the exists-left eigenvariables on the path to its chosen son, and
// a disjunctive node merges the continued branch with its arms via oplus.
inline Formula chi_selected(const StagedTree& t, const SelectedTree& sel,
                            int sigma) {
  std::set<int> members(sel.members.begin(), sel.members.end());
  const TRNode& n = t.at(sigma);
  if (n.gate == Gate::Zero) return chi(n.seq);
  if (n.gate == Gate::And) {
    auto it = sel.chosen_son.find(sigma);
    if (it == sel.chosen_son.end()) return chi(n.seq);  // leaf of the selection
    int son = it->second;
    Formula a = chi_selected(t, sel, son);
    return bind_universal(a, n.exl_vars[t.at(son).component]);
  }
  // disjunctive node: arms first, then merge with the continued branch
  bool has_son_in_sel = false;
  for (int s : n.sons) has_son_in_sel |= s >= 0 && members.count(s);
  if (!has_son_in_sel) return chi(n.seq);
  std::set<Formula> arms;
  for (size_t slot = 1; slot < n.sons.size(); ++slot) {
    int s = n.sons[slot];
    if (s < 0 || !members.count(s)) continue;
    Formula a = chi_selected(t, sel, s);
    const BranchUpper& u = n.br.uppers[slot - 1];
    if (u.rule == Rule::AllR) a = bind_universal(a, u.eigenvariable);
    arms.insert(std::move(a));
  }
  Formula rest = big_disj(arms);
  int cont = n.sons.empty() ? -1 : n.sons[0];
  if (cont >= 0 && members.count(cont))
    return oplus(chi_selected(t, sel, cont), rest);
  return rest;
}

inline Formula chi_tree(const StagedTree& t, const SelectedTree& sel) {
  return chi_selected(t, sel, sel.members.front());
}

}  // namespace seqcalc
