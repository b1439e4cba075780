#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqcalc/formula.hpp"
#include "seqcalc/printer.hpp"

namespace seqcalc {

// A cedent is a finite set of formulas, each carrying an "unanalyzed"
// mark.  A formula occurs at most once: inserting a marked copy next to
// an unmarked one collapses to the marked one (re-analysis is harmless,
// skipping analysis is not).
class Cedent {
 public:
  using Map = std::map<Formula, bool>;

  Cedent() = default;

  void insert(const Formula& f, bool marked) {
    auto [it, fresh] = entries_.emplace(f, marked);
    if (!fresh && marked) it->second = true;
  }
  // Replace whatever copy is present by an unmarked one.
  void insert_unmarked_force(const Formula& f) { entries_[f] = false; }
  void erase(const Formula& f) { entries_.erase(f); }

  bool contains(const Formula& f) const { return entries_.count(f) != 0; }
  bool contains_marked(const Formula& f) const {
    auto it = entries_.find(f);
    return it != entries_.end() && it->second;
  }
  bool contains_unmarked(const Formula& f) const {
    auto it = entries_.find(f);
    return it != entries_.end() && !it->second;
  }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

  // Mark every formula.
  void mark_all() {
    for (auto& [f, m] : entries_) m = true;
  }

  std::set<Formula> erased() const {
    std::set<Formula> out;
    for (const auto& [f, m] : entries_) out.insert(f);
    return out;
  }

  friend int cmp(const Cedent& a, const Cedent& b) {
    auto i = a.entries_.begin();
    auto j = b.entries_.begin();
    for (; i != a.entries_.end() && j != b.entries_.end(); ++i, ++j) {
      if (int c = cmp(i->first, j->first)) return c;
      if (i->second != j->second) return i->second ? 1 : -1;
    }
    if (i != a.entries_.end()) return 1;
    if (j != b.entries_.end()) return -1;
    return 0;
  }

 private:
  Map entries_;
};

struct Sequent {
  Cedent antecedent;
  Cedent succedent;
};

inline int cmp(const Sequent& a, const Sequent& b) {
  if (int c = cmp(a.antecedent, b.antecedent)) return c;
  return cmp(a.succedent, b.succedent);
}
inline bool operator==(const Sequent& a, const Sequent& b) {
  return cmp(a, b) == 0;
}
inline bool operator!=(const Sequent& a, const Sequent& b) {
  return cmp(a, b) != 0;
}
inline bool operator<(const Sequent& a, const Sequent& b) {
  return cmp(a, b) < 0;
}

// Every formula marked: the search always starts from a fully marked root.
inline Sequent mark_all(const Sequent& s) {
  Sequent r = s;
  r.antecedent.mark_all();
  r.succedent.mark_all();
  return r;
}

// Mark-erased sequent, as a pair of plain formula sets.
struct ErasedSequent {
  std::set<Formula> antecedent;
  std::set<Formula> succedent;
};

inline ErasedSequent erase_marks(const Sequent& s) {
  return {s.antecedent.erased(), s.succedent.erased()};
}

inline int cmp(const ErasedSequent& a, const ErasedSequent& b) {
  auto cmp_sets = [](const std::set<Formula>& x, const std::set<Formula>& y) {
    auto i = x.begin();
    auto j = y.begin();
    for (; i != x.end() && j != y.end(); ++i, ++j)
      if (int c = cmp(*i, *j)) return c;
    if (i != x.end()) return 1;
    if (j != y.end()) return -1;
    return 0;
  };
  if (int c = cmp_sets(a.antecedent, b.antecedent)) return c;
  return cmp_sets(a.succedent, b.succedent);
}
inline bool operator==(const ErasedSequent& a, const ErasedSequent& b) {
  return cmp(a, b) == 0;
}
inline bool operator<(const ErasedSequent& a, const ErasedSequent& b) {
  return cmp(a, b) < 0;
}

// Axioms are read on erased cedents: (T) a common atom, (bot) bottom on
// the left.  Marks are bookkeeping, not logic.
inline bool is_axiom(const Sequent& s) {
  for (const auto& [f, m] : s.antecedent) {
    if (f.is_bottom()) return true;
    if (f.is_atomic() && s.succedent.contains(f)) return true;
  }
  return false;
}

inline std::set<int> free_vars(const Sequent& s) {
  std::set<int> out;
  for (const auto& [f, m] : s.antecedent) collect_free_vars(f, out);
  for (const auto& [f, m] : s.succedent) collect_free_vars(f, out);
  return out;
}

inline Signature signature_of(const Sequent& s) {
  Signature sig;
  for (const auto& [f, m] : s.antecedent) collect_signature(f, sig);
  for (const auto& [f, m] : s.succedent) collect_signature(f, sig);
  return sig;
}

inline int sequent_size(const Sequent& s) {
  int n = 0;
  for (const auto& [f, m] : s.antecedent) n += formula_size(f);
  for (const auto& [f, m] : s.succedent) n += formula_size(f);
  return n;
}

inline bool has_quantifier(const Sequent& s) {
  for (const auto& [f, m] : s.antecedent)
    if (has_quantifier(f)) return true;
  for (const auto& [f, m] : s.succedent)
    if (has_quantifier(f)) return true;
  return false;
}

inline bool has_predicate(const Sequent& s) {
  for (const auto& [f, m] : s.antecedent)
    if (has_predicate(f)) return true;
  for (const auto& [f, m] : s.succedent)
    if (has_predicate(f)) return true;
  return false;
}

// A sequent is positive iff every succedent formula is positive and
// every antecedent formula is negative.
inline bool is_positive_sequent(const Sequent& s) {
  for (const auto& [f, m] : s.antecedent)
    if (!classify_positive(f, /*positive=*/false)) return false;
  for (const auto& [f, m] : s.succedent)
    if (!classify_positive(f, /*positive=*/true)) return false;
  return true;
}

// Human-readable diagnostic for a non-positive sequent: names the first
// offending quantifier occurrence.
inline std::optional<std::string> positivity_diagnostic(const Sequent& s) {
  auto offending = [](const Formula& f, bool positive) -> std::optional<std::string> {
    auto rec = [](auto&& self, const Formula& g, bool pos,
                  bool clean) -> std::optional<std::string> {
      switch (g.kind) {
        case Formula::Kind::Forall:
          if (!pos) {
            const Formula* h = &g;
            while (h->kind == Formula::Kind::Forall) h = &h->sub[0];
            if (has_quantifier(*h))
              return "universal quantifier with quantified matrix occurs "
                     "negatively in " +
                     to_string(g);
            return std::nullopt;
          }
          if (!clean && !detail::flat_scope(g.sub[0]))
            return "universal quantifier with non-flat scope occurs under "
                   "an implication antecedent in " +
                   to_string(g);
          if (!clean) return std::nullopt;
          return self(self, g.sub[0], pos, clean);
        case Formula::Kind::Exists:
          if (pos)
            return "existential quantifier occurs positively in " + to_string(g);
          return self(self, g.sub[0], pos, clean);
        case Formula::Kind::Implies:
          if (auto r = self(self, g.sub[0], !pos, false)) return r;
          return self(self, g.sub[1], pos, clean);
        case Formula::Kind::Or:
        case Formula::Kind::And:
          if (auto r = self(self, g.sub[0], pos, clean)) return r;
          return self(self, g.sub[1], pos, clean);
        default:
          return std::nullopt;
      }
    };
    return rec(rec, f, positive, positive);
  };
  for (const auto& [f, m] : s.antecedent)
    if (auto r = offending(f, false))
      return "antecedent formula " + to_string(f) + ": " + *r;
  for (const auto& [f, m] : s.succedent)
    if (auto r = offending(f, true))
      return "succedent formula " + to_string(f) + ": " + *r;
  return std::nullopt;
}

enum class Mode { Prop, Positive, Full };

namespace detail {

inline Term rename_free(const Term& t, const std::map<int, int>& ren) {
  if (t.kind == Term::Kind::Free) {
    auto it = ren.find(t.index);
    return it == ren.end() ? t : Term::free(it->second);
  }
  if (t.kind == Term::Kind::App) {
    Term r = t;
    for (auto& a : r.args) a = rename_free(a, ren);
    return r;
  }
  return t;
}

inline Formula rename_free(const Formula& f, const std::map<int, int>& ren) {
  Formula r = f;
  for (auto& a : r.args) a = detail::rename_free(a, ren);
  for (auto& s : r.sub) s = rename_free(s, ren);
  return r;
}

}  // namespace detail

// Branch-loop detection key: free variables outside `fixed` are replaced
// by their rank (offset to keep them apart from real indices).  Two
// sequents produced by the same sequence of steps with differently named
// eigenvariables get the same key, since eigenvariables are introduced in
// increasing order along a branch.
inline Sequent canonical_key(const Sequent& s, const std::set<int>& fixed) {
  std::map<int, int> ren;
  for (int v : free_vars(s))
    if (!fixed.count(v)) {
      int rank = static_cast<int>(ren.size());
      ren.emplace(v, 1000000 + rank);
    }
  if (ren.empty()) return s;
  Sequent r;
  for (const auto& [f, m] : s.antecedent)
    r.antecedent.insert(detail::rename_free(f, ren), m);
  for (const auto& [f, m] : s.succedent)
    r.succedent.insert(detail::rename_free(f, ren), m);
  return r;
}

// The termination measure dp(S) = (N+1)*a_S + b_S, where N is fixed from
// the root sequent.  In predicate modes a_S also counts marked positive
// universal quantifiers and b_S marked existential quantifiers.
struct Measures {
  int a = 0;
  int b = 0;
  int N = 0;
  long long dp = 0;
  int size = 0;
};

inline Measures measures(const Sequent& s, int N, Mode mode) {
  Measures m;
  m.N = N;
  auto add = [&](const Cedent& c, bool positive) {
    for (const auto& [f, marked] : c) {
      if (!marked) continue;
      ConnectiveCounts cc;
      count_connectives(f, positive, cc);
      m.a += cc.pos_implies;
      m.b += cc.total_or_and_implies;
      if (mode != Mode::Prop) {
        m.a += cc.pos_forall;
        m.b += cc.total_exists;
      }
    }
  };
  add(s.antecedent, /*positive=*/false);
  add(s.succedent, /*positive=*/true);
  m.dp = static_cast<long long>(N + 1) * m.a + m.b;
  m.size = sequent_size(s);
  return m;
}

// N as computed from the root sequent (all of whose formulas are marked).
inline int root_connective_count(const Sequent& s0, Mode mode) {
  int n = 0;
  auto add = [&](const Cedent& c, bool positive) {
    for (const auto& [f, marked] : c) {
      ConnectiveCounts cc;
      count_connectives(f, positive, cc);
      n += cc.total_or_and_implies;
      if (mode != Mode::Prop) n += cc.total_exists;
    }
  };
  add(s0.antecedent, false);
  add(s0.succedent, true);
  return n;
}

}  // namespace seqcalc
