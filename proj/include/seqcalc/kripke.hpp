#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqcalc/parser.hpp"
#include "seqcalc/sequent.hpp"

namespace seqcalc {

// Finite rooted intuitionistic Kripke model, propositional signature.
// le[i][j] reads "world i is below world j"; it must be reflexive and
// transitive with the root below everything, and the valuation monotone.
struct PropKripkeModel {
  std::vector<std::set<std::string>> valuation;
  std::vector<std::vector<bool>> le;
  int root = 0;

  int size() const { return static_cast<int>(valuation.size()); }
};

inline bool forces(const PropKripkeModel& m, int w, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return m.valuation[w].count(f.pred) != 0;
    case Formula::Kind::Bottom:
      return false;
    case Formula::Kind::And:
      return forces(m, w, f.left()) && forces(m, w, f.right());
    case Formula::Kind::Or:
      return forces(m, w, f.left()) || forces(m, w, f.right());
    case Formula::Kind::Implies:
      for (int v = 0; v < m.size(); ++v)
        if (m.le[w][v] && forces(m, v, f.left()) && !forces(m, v, f.right()))
          return false;
      return true;
    default:
      throw std::runtime_error("quantifier in propositional model check");
  }
}

// Structural sanity: reflexive, transitive, rooted, monotone valuation.
// Returns a description of the first violation found.
inline std::optional<std::string> validate(const PropKripkeModel& m) {
  int n = m.size();
  if (n == 0) return "model has no worlds";
  if (static_cast<int>(m.le.size()) != n) return "order matrix size mismatch";
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(m.le[i].size()) != n)
      return "order matrix row size mismatch";
    if (!m.le[i][i]) return "order not reflexive at world " + std::to_string(i);
    if (!m.le[m.root][i])
      return "root is not below world " + std::to_string(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (m.le[i][j] && m.le[j][k] && !m.le[i][k])
          return "order not transitive via " + std::to_string(i) + " <= " +
                 std::to_string(j) + " <= " + std::to_string(k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.le[i][j])
        for (const auto& p : m.valuation[i])
          if (!m.valuation[j].count(p))
            return "valuation not monotone: atom " + p + " true at " +
                   std::to_string(i) + " but not at " + std::to_string(j) +
                   " above it";
  return std::nullopt;
}

// The model is a countermodel for S iff at the root every antecedent
// formula is forced and no succedent formula is.
inline bool falsifies(const PropKripkeModel& m, const Sequent& s) {
  for (const auto& [f, mk] : s.antecedent)
    if (!forces(m, m.root, f)) return false;
  for (const auto& [f, mk] : s.succedent)
    if (forces(m, m.root, f)) return false;
  return true;
}

inline std::set<std::string> atoms_of(const Sequent& s) {
  std::set<std::string> out;
  auto rec = [&](auto&& self, const Formula& f) -> void {
    if (f.kind == Formula::Kind::Atom) out.insert(f.pred);
    for (const auto& g : f.sub) self(self, g);
  };
  for (const auto& [f, m] : s.antecedent) rec(rec, f);
  for (const auto& [f, m] : s.succedent) rec(rec, f);
  return out;
}

namespace detail {

// All reflexive transitive antisymmetric orders on {0..n-1} with 0 as
// root.  Partial orders suffice: any rooted quasi-order countermodel
// quotients to one.
inline std::vector<std::vector<std::vector<bool>>> rooted_orders(int n) {
  std::vector<std::pair<int, int>> off_diag;
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n; ++j)
      if (i != j) off_diag.emplace_back(i, j);  // 0 as target never needed
  std::vector<std::vector<std::vector<bool>>> out;
  for (unsigned mask = 0; mask < (1u << off_diag.size()); ++mask) {
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) le[i][i] = true;
    for (size_t b = 0; b < off_diag.size(); ++b)
      if (mask & (1u << b)) le[off_diag[b].first][off_diag[b].second] = true;
    bool ok = true;
    for (int j = 1; j < n && ok; ++j) ok = le[0][j];
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        if (le[i][j] && le[j][i] && i != j) ok = false;  // antisymmetry
        for (int k = 0; k < n && ok; ++k)
          if (le[i][j] && le[j][k] && !le[i][k]) ok = false;
      }
    if (ok) out.push_back(std::move(le));
  }
  return out;
}

// Up-closed subsets of the order, as bitmasks over worlds.
inline std::vector<unsigned> up_sets(const std::vector<std::vector<bool>>& le) {
  int n = static_cast<int>(le.size());
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      if (mask & (1u << i))
        for (int j = 0; j < n && ok; ++j)
          if (le[i][j] && !(mask & (1u << j))) ok = false;
    if (ok) out.push_back(mask);
  }
  return out;
}

}  // namespace detail

// Exhaustive search for a countermodel with at most max_worlds worlds.
// Independent of the proof search machinery, so it can serve as an oracle
// against it on small inputs.
inline std::optional<PropKripkeModel> brute_force_countermodel(
    const Sequent& s, int max_worlds = 4) {
  std::set<std::string> atom_set = atoms_of(s);
  std::vector<std::string> atoms(atom_set.begin(), atom_set.end());
  int k = static_cast<int>(atoms.size());
  for (int n = 1; n <= max_worlds; ++n) {
    for (const auto& le : detail::rooted_orders(n)) {
      std::vector<unsigned> ups = detail::up_sets(le);
      // Assign each atom an up-closed truth set; monotone by construction.
      std::vector<size_t> choice(k, 0);
      while (true) {
        PropKripkeModel m;
        m.le = le;
        m.root = 0;
        m.valuation.assign(n, {});
        for (int a = 0; a < k; ++a)
          for (int w = 0; w < n; ++w)
            if (ups[choice[a]] & (1u << w)) m.valuation[w].insert(atoms[a]);
        if (falsifies(m, s)) return m;
        int a = 0;
        for (; a < k; ++a) {
          if (++choice[a] < ups.size()) break;
          choice[a] = 0;
        }
        if (a == k) break;
        if (k == 0) break;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Predicate models: finite per-world domains of literal terms, monotone
// along the order; function symbols are interpreted syntactically, so an
// atom mentioning a term outside the listed domain is simply not a fact.

struct PredKripkeModel {
  std::vector<std::vector<Term>> domain;
  std::vector<std::set<Formula>> facts;  // ground atoms
  std::vector<std::vector<bool>> le;
  int root = 0;

  int size() const { return static_cast<int>(facts.size()); }
};

namespace detail {

inline bool forces_pred(const PredKripkeModel& m, int w, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return m.facts[w].count(f) != 0;
    case Formula::Kind::Bottom:
      return false;
    case Formula::Kind::And:
      return forces_pred(m, w, f.left()) && forces_pred(m, w, f.right());
    case Formula::Kind::Or:
      return forces_pred(m, w, f.left()) || forces_pred(m, w, f.right());
    case Formula::Kind::Implies:
      for (int v = 0; v < m.size(); ++v)
        if (m.le[w][v] && forces_pred(m, v, f.left()) &&
            !forces_pred(m, v, f.right()))
          return false;
      return true;
    case Formula::Kind::Exists:
      for (const auto& d : m.domain[w])
        if (forces_pred(m, w, instantiate(f, d))) return true;
      return false;
    case Formula::Kind::Forall:
      for (int v = 0; v < m.size(); ++v)
        if (m.le[w][v])
          for (const auto& d : m.domain[v])
            if (!forces_pred(m, v, instantiate(f, d))) return false;
      return true;
  }
  return false;
}

}  // namespace detail

inline bool forces(const PredKripkeModel& m, int w, const Formula& f) {
  return detail::forces_pred(m, w, f);
}

inline std::optional<std::string> validate(const PredKripkeModel& m) {
  int n = m.size();
  if (n == 0) return "model has no worlds";
  if (static_cast<int>(m.le.size()) != n ||
      static_cast<int>(m.domain.size()) != n)
    return "model component size mismatch";
  for (int i = 0; i < n; ++i) {
    if (!m.le[i][i]) return "order not reflexive at world " + std::to_string(i);
    if (!m.le[m.root][i])
      return "root is not below world " + std::to_string(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (m.le[i][j] && m.le[j][k] && !m.le[i][k])
          return "order not transitive";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.le[i][j]) {
        std::set<Term> dj(m.domain[j].begin(), m.domain[j].end());
        for (const auto& d : m.domain[i])
          if (!dj.count(d))
            return "domain not monotone: " + term_to_string(d) + " at " +
                   std::to_string(i) + " missing at " + std::to_string(j);
        for (const auto& f : m.facts[i])
          if (!m.facts[j].count(f))
            return "facts not monotone: " + to_string(f) + " at " +
                   std::to_string(i) + " missing at " + std::to_string(j);
      }
  return std::nullopt;
}

inline bool falsifies(const PredKripkeModel& m, const Sequent& s) {
  for (const auto& [f, mk] : s.antecedent)
    if (!forces(m, m.root, f)) return false;
  for (const auto& [f, mk] : s.succedent)
    if (forces(m, m.root, f)) return false;
  return true;
}

}  // namespace seqcalc
