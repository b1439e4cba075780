#pragma once

#include <optional>
#include <set>
#include <string>

#include "seqcalc/deduction.hpp"
#include "seqcalc/parser.hpp"

namespace seqcalc {

// Validation of finished derivations.  Works on mark-erased sequents:
// cedents are sets, contraction is absorbed, and each step must be an
// instance of an LJpm / LJm rule.  Quantifier instantiation steps may
// introduce several instances at once.

namespace detail {

// Match g against the body of the quantified formula q, solving for the
// bound variable.  If the variable does not occur, any term works and g
// must equal the body verbatim.
inline bool match_term(const Term& pat, const Term& t, const std::string& x,
                       std::optional<Term>& sol) {
  if (pat.kind == Term::Kind::Bound && pat.name == x) {
    if (sol && *sol != t) return false;
    sol = t;
    return true;
  }
  if (pat.kind != t.kind) return false;
  switch (pat.kind) {
    case Term::Kind::Free:
      return pat.index == t.index;
    case Term::Kind::Bound:
      return pat.name == t.name;
    case Term::Kind::App:
      if (pat.name != t.name || pat.args.size() != t.args.size()) return false;
      for (size_t i = 0; i < pat.args.size(); ++i)
        if (!match_term(pat.args[i], t.args[i], x, sol)) return false;
      return true;
  }
  return false;
}

inline bool match_formula(const Formula& pat, const Formula& g,
                          const std::string& x, std::optional<Term>& sol) {
  if (pat.kind != g.kind) return false;
  switch (pat.kind) {
    case Formula::Kind::Atom:
      if (pat.pred != g.pred || pat.args.size() != g.args.size()) return false;
      for (size_t i = 0; i < pat.args.size(); ++i)
        if (!match_term(pat.args[i], g.args[i], x, sol)) return false;
      return true;
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (pat.var != g.var) return false;
      if (pat.var == x) return pat.body() == g.body();  // shadowed
      return match_formula(pat.body(), g.body(), x, sol);
    default:
      return match_formula(pat.left(), g.left(), x, sol) &&
             match_formula(pat.right(), g.right(), x, sol);
  }
}

// The instantiating term if g == q.body()[q.var := t] for some t.  When
// the bound variable does not occur, any term fits and `any` is set.
struct Match {
  bool any = false;
  Term t;
};

inline std::optional<Match> instance_of(const Formula& q, const Formula& g) {
  std::optional<Term> sol;
  if (!match_formula(q.body(), g, q.var, sol)) return std::nullopt;
  Match m;
  if (sol)
    m.t = *sol;
  else
    m.any = true;
  return m;
}

inline std::set<Formula> with(std::set<Formula> s, const Formula& f) {
  s.insert(f);
  return s;
}
inline std::set<Formula> with2(std::set<Formula> s, const Formula& f,
                               const Formula& g) {
  s.insert(f);
  s.insert(g);
  return s;
}

inline bool subset(const std::set<Formula>& a, const std::set<Formula>& b) {
  for (const auto& f : a)
    if (!b.count(f)) return false;
  return true;
}

inline std::set<int> erased_free_vars(const ErasedSequent& e) {
  std::set<int> out;
  for (const auto& f : e.antecedent) collect_free_vars(f, out);
  for (const auto& f : e.succedent) collect_free_vars(f, out);
  return out;
}

// True if some principal formula of the given kind in the lower sequent
// justifies the step.
inline bool step_fits(Rule rule, const ErasedSequent& lo,
                      const std::vector<ErasedSequent>& up) {
  switch (rule) {
    case Rule::AxiomT:
      if (!up.empty()) return false;
      for (const auto& f : lo.antecedent)
        if (f.is_atomic() && lo.succedent.count(f)) return true;
      return false;
    case Rule::AxiomBot:
      return up.empty() && lo.antecedent.count(Formula::bottom()) != 0;
    case Rule::AndL:
      if (up.size() != 1) return false;
      for (const auto& f : lo.antecedent)
        if (f.kind == Formula::Kind::And &&
            up[0].antecedent ==
                with2(lo.antecedent, f.left(), f.right()) &&
            up[0].succedent == lo.succedent)
          return true;
      return false;
    case Rule::OrL:
      if (up.size() != 2) return false;
      for (const auto& f : lo.antecedent)
        if (f.kind == Formula::Kind::Or &&
            up[0].antecedent == with(lo.antecedent, f.left()) &&
            up[1].antecedent == with(lo.antecedent, f.right()) &&
            up[0].succedent == lo.succedent && up[1].succedent == lo.succedent)
          return true;
      return false;
    case Rule::ImpL:
      if (up.size() != 2) return false;
      for (const auto& f : lo.antecedent)
        if (f.kind == Formula::Kind::Implies &&
            up[0].antecedent == lo.antecedent &&
            up[0].succedent == with(lo.succedent, f.left()) &&
            up[1].antecedent == with(lo.antecedent, f.right()) &&
            up[1].succedent == lo.succedent)
          return true;
      return false;
    case Rule::OrR:
      if (up.size() != 1) return false;
      for (const auto& f : lo.succedent)
        if (f.kind == Formula::Kind::Or &&
            up[0].succedent == with2(lo.succedent, f.left(), f.right()) &&
            up[0].antecedent == lo.antecedent)
          return true;
      return false;
    case Rule::AndR:
      if (up.size() != 2) return false;
      for (const auto& f : lo.succedent)
        if (f.kind == Formula::Kind::And &&
            up[0].succedent == with(lo.succedent, f.left()) &&
            up[1].succedent == with(lo.succedent, f.right()) &&
            up[0].antecedent == lo.antecedent &&
            up[1].antecedent == lo.antecedent)
          return true;
      return false;
    case Rule::ImpR:
      // Succedent is replaced: this is the non-invertible inference.
      if (up.size() != 1) return false;
      for (const auto& f : lo.succedent)
        if (f.kind == Formula::Kind::Implies &&
            up[0].antecedent == with(lo.antecedent, f.left()) &&
            up[0].succedent == std::set<Formula>{f.right()})
          return true;
      return false;
    case Rule::AllR: {
      if (up.size() != 1) return false;
      if (up[0].antecedent != lo.antecedent) return false;
      if (up[0].succedent.size() != 1) return false;
      const Formula& g = *up[0].succedent.begin();
      for (const auto& f : lo.succedent) {
        if (f.kind != Formula::Kind::Forall) continue;
        auto m = instance_of(f, g);
        if (!m) continue;
        if (m->any) return true;  // a fresh eigenvariable always exists
        if (m->t.kind == Term::Kind::Free &&
            !erased_free_vars(lo).count(m->t.index))
          return true;
      }
      return false;
    }
    case Rule::ExL: {
      if (up.size() != 1) return false;
      if (up[0].succedent != lo.succedent) return false;
      for (const auto& f : lo.antecedent) {
        if (f.kind != Formula::Kind::Exists) continue;
        std::set<Formula> extra;
        for (const auto& g : up[0].antecedent)
          if (!lo.antecedent.count(g)) extra.insert(g);
        if (extra.size() != 1) continue;
        if (!subset(lo.antecedent, up[0].antecedent)) continue;
        auto m = instance_of(f, *extra.begin());
        if (!m) continue;
        if (m->any) return true;
        if (m->t.kind == Term::Kind::Free &&
            !erased_free_vars(lo).count(m->t.index))
          return true;
      }
      return false;
    }
    case Rule::ExR: {
      // One or more instances at once; the principal is retained.
      if (up.size() != 1) return false;
      if (up[0].antecedent != lo.antecedent) return false;
      if (!subset(lo.succedent, up[0].succedent)) return false;
      if (up[0].succedent == lo.succedent) return false;  // vacuous
      for (const auto& f : lo.succedent) {
        if (f.kind != Formula::Kind::Exists) continue;
        bool all = true;
        for (const auto& g : up[0].succedent)
          if (!lo.succedent.count(g) && !instance_of(f, g)) all = false;
        if (all) return true;
      }
      return false;
    }
    case Rule::AllL: {
      if (up.size() != 1) return false;
      if (up[0].succedent != lo.succedent) return false;
      if (!subset(lo.antecedent, up[0].antecedent)) return false;
      if (up[0].antecedent == lo.antecedent) return false;
      for (const auto& f : lo.antecedent) {
        if (f.kind != Formula::Kind::Forall) continue;
        bool all = true;
        for (const auto& g : up[0].antecedent)
          if (!lo.antecedent.count(g) && !instance_of(f, g)) all = false;
        if (all) return true;
      }
      return false;
    }
    default:
      return false;
  }
}

}  // namespace detail

// First error in the derivation, if any; std::nullopt means it checks out.
inline std::optional<std::string> check_derivation(const DeductionTree& d) {
  ErasedSequent lo = erase_marks(d.seq);
  std::vector<ErasedSequent> up;
  for (const auto& c : d.children) up.push_back(erase_marks(c.seq));
  if (d.rule == Rule::Leaf)
    return "unjustified leaf: " + to_string(d.seq);
  if (!detail::step_fits(d.rule, lo, up))
    return std::string("invalid ") + rule_name(d.rule) +
           " step at: " + to_string(d.seq);
  for (const auto& c : d.children)
    if (auto e = check_derivation(c)) return e;
  return std::nullopt;
}

// Convenience: a valid derivation of exactly this (erased) sequent.
inline std::optional<std::string> check_derivation_of(const DeductionTree& d,
                                                      const Sequent& goal) {
  if (erase_marks(d.seq) != erase_marks(goal))
    return "derivation root " + to_string(d.seq) +
           " does not match goal " + to_string(goal);
  return check_derivation(d);
}

}  // namespace seqcalc
