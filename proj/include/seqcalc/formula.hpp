#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "seqcalc/term.hpp"

namespace seqcalc {

// Formulas of LJpm / LJm.  A propositional variable is an Atom with an
// empty argument list.  Negation is sugar: ~a == a -> bot.
class Formula {
 public:
  enum class Kind { Atom, Bottom, Or, And, Implies, Exists, Forall };

  Kind kind = Kind::Bottom;
  std::string pred;          // Atom predicate / propositional variable
  std::vector<Term> args;    // Atom arguments
  std::string var;           // Exists / Forall bound variable
  std::vector<Formula> sub;  // connective / quantifier children

  Formula() = default;

  static Formula atom(std::string p, std::vector<Term> as = {}) {
    Formula f;
    f.kind = Kind::Atom;
    f.pred = std::move(p);
    f.args = std::move(as);
    return f;
  }
  static Formula bottom() { return Formula(); }
  static Formula binary(Kind k, Formula l, Formula r) {
    Formula f;
    f.kind = k;
    f.sub.push_back(std::move(l));
    f.sub.push_back(std::move(r));
    return f;
  }
  static Formula disj(Formula l, Formula r) {
    return binary(Kind::Or, std::move(l), std::move(r));
  }
  static Formula conj(Formula l, Formula r) {
    return binary(Kind::And, std::move(l), std::move(r));
  }
  static Formula implies(Formula l, Formula r) {
    return binary(Kind::Implies, std::move(l), std::move(r));
  }
  static Formula neg(Formula a) { return implies(std::move(a), bottom()); }
  static Formula quant(Kind k, std::string x, Formula body) {
    Formula f;
    f.kind = k;
    f.var = std::move(x);
    f.sub.push_back(std::move(body));
    return f;
  }
  static Formula exists(std::string x, Formula body) {
    return quant(Kind::Exists, std::move(x), std::move(body));
  }
  static Formula forall(std::string x, Formula body) {
    return quant(Kind::Forall, std::move(x), std::move(body));
  }
  // Top is not in the language; it is spelled bot -> bot.
  static Formula top() { return implies(bottom(), bottom()); }

  const Formula& left() const { return sub[0]; }
  const Formula& right() const { return sub[1]; }
  const Formula& body() const { return sub[0]; }

  bool is_atomic() const { return kind == Kind::Atom; }
  bool is_bottom() const { return kind == Kind::Bottom; }
  bool is_propositional_var() const {
    return kind == Kind::Atom && args.empty();
  }
};

inline int cmp(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Formula::Kind::Atom: {
      if (int c = a.pred.compare(b.pred)) return c < 0 ? -1 : 1;
      for (size_t i = 0; i < a.args.size() && i < b.args.size(); ++i)
        if (int c = cmp(a.args[i], b.args[i])) return c;
      return a.args.size() < b.args.size() ? -1
           : a.args.size() > b.args.size() ? 1 : 0;
    }
    case Formula::Kind::Bottom:
      return 0;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (int c = a.var.compare(b.var)) return c < 0 ? -1 : 1;
      return cmp(a.sub[0], b.sub[0]);
    default:
      if (int c = cmp(a.sub[0], b.sub[0])) return c;
      return cmp(a.sub[1], b.sub[1]);
  }
}

inline bool operator==(const Formula& a, const Formula& b) {
  return cmp(a, b) == 0;
}
inline bool operator!=(const Formula& a, const Formula& b) {
  return cmp(a, b) != 0;
}
inline bool operator<(const Formula& a, const Formula& b) {
  return cmp(a, b) < 0;
}

// Capture-avoiding substitution of t for the bound variable x.  Free
// variables and bound variables live in disjoint alphabets, so no free
// variable of t can be captured; an inner quantifier rebinding x shadows it.
inline Formula subst(const Formula& f, const std::string& x, const Term& t) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      Formula r = f;
      for (auto& a : r.args) a = subst_term(a, x, t);
      return r;
    }
    case Formula::Kind::Bottom:
      return f;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (f.var == x) return f;  // shadowed
      Formula r = f;
      r.sub[0] = subst(f.sub[0], x, t);
      return r;
    }
    default: {
      Formula r = f;
      r.sub[0] = subst(f.sub[0], x, t);
      r.sub[1] = subst(f.sub[1], x, t);
      return r;
    }
  }
}

// Instantiate a quantified formula at t.
inline Formula instantiate(const Formula& q, const Term& t) {
  return subst(q.body(), q.var, t);
}

inline void collect_free_vars(const Formula& f, std::set<int>& out) {
  for (const auto& a : f.args) collect_free_vars(a, out);
  for (const auto& s : f.sub) collect_free_vars(s, out);
}

inline std::set<int> free_vars(const Formula& f) {
  std::set<int> out;
  collect_free_vars(f, out);
  return out;
}

inline bool mentions_free_var(const Formula& f, int idx) {
  return free_vars(f).count(idx) != 0;
}

inline void collect_signature(const Term& t, Signature& sig) {
  if (t.kind == Term::Kind::App) {
    sig.functions.emplace(t.name, static_cast<int>(t.args.size()));
    for (const auto& a : t.args) collect_signature(a, sig);
  }
}

inline void collect_signature(const Formula& f, Signature& sig) {
  if (f.kind == Formula::Kind::Atom && !f.args.empty()) {
    sig.predicates.emplace(f.pred, static_cast<int>(f.args.size()));
    for (const auto& a : f.args) collect_signature(a, sig);
  }
  for (const auto& s : f.sub) collect_signature(s, sig);
}

inline int formula_size(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      int n = 1;
      for (const auto& a : f.args) n += term_size(a);
      return n;
    }
    case Formula::Kind::Bottom:
      return 1;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return 2 + formula_size(f.sub[0]);
    default:
      return 1 + formula_size(f.sub[0]) + formula_size(f.sub[1]);
  }
}

inline bool has_quantifier(const Formula& f) {
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall)
    return true;
  for (const auto& s : f.sub)
    if (has_quantifier(s)) return true;
  return false;
}

inline bool has_predicate(const Formula& f) {
  if (f.kind == Formula::Kind::Atom && !f.args.empty()) return true;
  for (const auto& s : f.sub)
    if (has_predicate(s)) return true;
  return false;
}

inline bool has_implication(const Formula& f) {
  if (f.kind == Formula::Kind::Implies) return true;
  for (const auto& g : f.sub)
    if (has_implication(g)) return true;
  return false;
}

namespace detail {

// clean = the path so far never crossed the left of an implication.  A
// universal in such a position is analyzed exactly once (eigenvariable
// at the branching rule).  Under an implication-left the branching rule
// can re-mark and re-analyze it, pumping a fresh eigenvariable each
// round; the search still terminates when the scope is flat (atoms
// under and/or only), because nothing involving the eigenvariable then
// persists into the antecedent and the repetition cut fires.  An
// implication in the scope deposits its own antecedent at every round
// and the tree grows forever, so those occurrences are rejected.
inline bool flat_scope(const Formula& f) {
  return !has_quantifier(f) && !has_implication(f);
}

inline bool classify_positive_rec(const Formula& f, bool positive,
                                  bool clean) {
  switch (f.kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::Or:
    case Formula::Kind::And:
      return classify_positive_rec(f.sub[0], positive, clean) &&
             classify_positive_rec(f.sub[1], positive, clean);
    case Formula::Kind::Implies:
      return classify_positive_rec(f.sub[0], !positive, false) &&
             classify_positive_rec(f.sub[1], positive, clean);
    case Formula::Kind::Forall: {
      if (positive)
        return (clean && classify_positive_rec(f.sub[0], positive, clean)) ||
               flat_scope(f.sub[0]);
      // Negative universals (antecedent side) are instantiated over the
      // sequent's term domain.  A block of them over a quantifier-free
      // matrix is safe; an existential in the matrix would demand a
      // fresh witness per domain element and never saturate.
      const Formula* g = &f;
      while (g->kind == Formula::Kind::Forall) g = &g->sub[0];
      return !has_quantifier(*g);
    }
    case Formula::Kind::Exists:
      return !positive && classify_positive_rec(f.sub[0], positive, clean);
  }
  return false;
}

}  // namespace detail

// Occurrence-polarity classification (classical sense): a formula is
// positive at the given polarity iff every universal quantifier occurs
// positively and every existential quantifier negatively in it, with
// two amendments tied to the terminating search: a positive universal
// under an implication-left must have a flat scope, and a negative
// universal is tolerated when its scope is quantifier free.
inline bool classify_positive(const Formula& f, bool positive) {
  return detail::classify_positive_rec(f, positive, positive);
}

// Counts of connective occurrences at a given polarity, used by the
// termination measure dp.
struct ConnectiveCounts {
  int pos_implies = 0;
  int pos_forall = 0;
  int total_or_and_implies = 0;
  int total_exists = 0;
};

inline void count_connectives(const Formula& f, bool positive,
                              ConnectiveCounts& out) {
  switch (f.kind) {
    case Formula::Kind::Atom:
    case Formula::Kind::Bottom:
      return;
    case Formula::Kind::Or:
    case Formula::Kind::And:
      ++out.total_or_and_implies;
      count_connectives(f.sub[0], positive, out);
      count_connectives(f.sub[1], positive, out);
      return;
    case Formula::Kind::Implies:
      ++out.total_or_and_implies;
      if (positive) ++out.pos_implies;
      count_connectives(f.sub[0], !positive, out);
      count_connectives(f.sub[1], positive, out);
      return;
    case Formula::Kind::Forall:
      if (positive) ++out.pos_forall;
      count_connectives(f.sub[0], positive, out);
      return;
    case Formula::Kind::Exists:
      ++out.total_exists;
      count_connectives(f.sub[0], positive, out);
      return;
  }
}

}  // namespace seqcalc
