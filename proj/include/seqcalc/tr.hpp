#pragma once

#include <cassert>
#include <optional>
#include <set>
#include <vector>

#include "seqcalc/deduction.hpp"

namespace seqcalc {

// Global supply of fresh free variables.  Eigenvariables are never
// reused, which keeps them distinct from each other and from everything
// introduced before.
struct EigenvariableLedger {
  int next = 0;
  std::set<int> avoid;  // indices never to hand out (branch-local reuse)
  std::vector<int> introduced;

  int fresh() {
    while (avoid.count(next)) ++next;
    introduced.push_back(next);
    return next++;
  }
  void reserve_at_least(int idx) {
    if (idx > next) next = idx;
  }
};

struct TrContext {
  Mode mode = Mode::Prop;
  const Signature* sig = nullptr;
  EigenvariableLedger* ledger = nullptr;
  // (n,A)-instantiation data, Full mode only.
  std::vector<Term> terms;  // Tm(A) restricted to the first n global terms
  std::set<int> A;

  void set_stage(int n, std::set<int> vars) {
    A = std::move(vars);
    terms = enumerate_terms(*sig, A, n);
  }
};

inline bool mentions_bound(const Formula& f, const std::string& x) {
  auto term_mentions = [&](auto&& self, const Term& t) -> bool {
    if (t.kind == Term::Kind::Bound) return t.name == x;
    for (const auto& a : t.args)
      if (self(self, a)) return true;
    return false;
  };
  for (const auto& a : f.args)
    if (term_mentions(term_mentions, a)) return true;
  if ((f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) &&
      f.var == x)
    return false;
  for (const auto& s : f.sub)
    if (mentions_bound(s, x)) return true;
  return false;
}

namespace detail {

inline bool exists_witnessed(const Sequent& s, const Formula& ex,
                             const std::set<Formula>& gamma) {
  if (!mentions_bound(ex.body(), ex.var))
    return gamma.count(ex.body()) != 0;
  for (int a : free_vars(s))
    if (gamma.count(instantiate(ex, Term::free(a)))) return true;
  return false;
}

inline bool term_ground(const Term& t) {
  if (t.kind == Term::Kind::Bound) return false;
  for (const auto& a : t.args)
    if (!term_ground(a)) return false;
  return true;
}

inline void ground_subterms(const Term& t, std::set<Term>& out) {
  for (const auto& a : t.args) ground_subterms(a, out);
  if (term_ground(t)) out.insert(t);
}

inline void ground_subterms(const Formula& f, std::set<Term>& out) {
  for (const auto& a : f.args) ground_subterms(a, out);
  for (const auto& g : f.sub) ground_subterms(g, out);
}

// Instantiation terms for an antecedent universal in positive mode: the
// ground subterms occurring in the sequent, the seed a0 if there are
// none.  Scopes are quantifier free there, so instances never bring in
// new terms and the closure is reached after finitely many rounds.
inline std::vector<Term> positive_domain(const Sequent& s) {
  std::set<Term> dom;
  for (const auto& [f, m] : s.antecedent) ground_subterms(f, dom);
  for (const auto& [f, m] : s.succedent) ground_subterms(f, dom);
  for (int v : free_vars(s)) dom.insert(Term::free(v));
  if (dom.empty()) dom.insert(Term::free(0));
  return {dom.begin(), dom.end()};
}

}  // namespace detail

// Saturation conditions on unmarked formulas (propositional clauses 1-5,
// plus the antecedent-existential witness clause outside Prop mode, plus
// the Tm(A)|n instantiation clauses in Full mode).
inline bool is_saturated(const Sequent& s, const TrContext& ctx) {
  ErasedSequent e = erase_marks(s);
  for (const auto& [f, marked] : s.antecedent) {
    if (marked) continue;
    switch (f.kind) {
      case Formula::Kind::Or:
        if (!e.antecedent.count(f.left()) && !e.antecedent.count(f.right()))
          return false;
        break;
      case Formula::Kind::And:
        if (!e.antecedent.count(f.left()) || !e.antecedent.count(f.right()))
          return false;
        break;
      case Formula::Kind::Implies:
        if (!e.succedent.count(f.left()) && !e.antecedent.count(f.right()))
          return false;
        break;
      case Formula::Kind::Exists:
        if (ctx.mode != Mode::Prop &&
            !detail::exists_witnessed(s, f, e.antecedent))
          return false;
        break;
      case Formula::Kind::Forall:
        if (ctx.mode == Mode::Full) {
          for (const auto& t : ctx.terms)
            if (!e.antecedent.count(instantiate(f, t))) return false;
        } else if (ctx.mode == Mode::Positive) {
          for (const auto& t : detail::positive_domain(s))
            if (!e.antecedent.count(instantiate(f, t))) return false;
        }
        break;
      default:
        break;
    }
  }
  for (const auto& [f, marked] : s.succedent) {
    if (marked) continue;
    switch (f.kind) {
      case Formula::Kind::Or:
        if (!e.succedent.count(f.left()) || !e.succedent.count(f.right()))
          return false;
        break;
      case Formula::Kind::And:
        if (!e.succedent.count(f.left()) && !e.succedent.count(f.right()))
          return false;
        break;
      case Formula::Kind::Exists:
        if (ctx.mode == Mode::Full)
          for (const auto& t : ctx.terms)
            if (!e.succedent.count(instantiate(f, t))) return false;
        break;
      default:
        break;  // no condition on succedent implications or universals
    }
  }
  return true;
}

// Marked succedent non-invertible formulas.
inline std::vector<Formula> marked_succ_implications(const Sequent& s) {
  std::vector<Formula> out;
  for (const auto& [f, m] : s.succedent)
    if (m && f.kind == Formula::Kind::Implies) out.push_back(f);
  return out;
}

inline std::vector<Formula> marked_succ_universals(const Sequent& s) {
  std::vector<Formula> out;
  for (const auto& [f, m] : s.succedent)
    if (m && f.kind == Formula::Kind::Forall) out.push_back(f);
  return out;
}

inline bool has_unmarked_ante_forall(const Sequent& s) {
  for (const auto& [f, m] : s.antecedent)
    if (!m && f.kind == Formula::Kind::Forall) return true;
  return false;
}

inline bool has_unmarked_succ_exists(const Sequent& s) {
  for (const auto& [f, m] : s.succedent)
    if (!m && f.kind == Formula::Kind::Exists) return true;
  return false;
}

namespace detail {

// True if every marked formula is an atom or bottom, except that marked
// succedent formulas of the kinds in `allowed_succ` are also tolerated.
inline bool marked_formulas_analyzed(const Sequent& s, Mode mode,
                                     bool allow_succ_noninvertible) {
  for (const auto& [f, m] : s.antecedent)
    if (m && !f.is_atomic() && !f.is_bottom()) return false;
  for (const auto& [f, m] : s.succedent) {
    if (!m || f.is_atomic() || f.is_bottom()) continue;
    if (allow_succ_noninvertible) {
      if (f.kind == Formula::Kind::Implies) continue;
      if (mode != Mode::Prop && f.kind == Formula::Kind::Forall) continue;
    }
    return false;
  }
  return true;
}

}  // namespace detail

// A refutable dead end: saturated, not an axiom, every marked formula an
// atom or bottom and, outside Prop mode, no universal antecedent formula
// and no existential succedent formula left to instantiate.
inline bool is_fully_analyzed(const Sequent& s, const TrContext& ctx) {
  if (is_axiom(s)) return false;
  if (!detail::marked_formulas_analyzed(s, ctx.mode, false)) return false;
  if (!is_saturated(s, ctx)) return false;
  if (ctx.mode != Mode::Prop) {
    // In positive mode an antecedent universal persists once its
    // instances are present (covered by saturation above); only the
    // full search defers it to a continued sequent.
    if (ctx.mode == Mode::Full && has_unmarked_ante_forall(s)) return false;
    if (has_unmarked_succ_exists(s)) return false;
  }
  return true;
}

// Eligible for the branching rule: saturated, not an axiom, all marked
// formulas analyzed up to succedent non-invertible ones, and there is
// something for (br) to do.
inline bool is_non_invertible(const Sequent& s, const TrContext& ctx) {
  if (is_axiom(s)) return false;
  if (!detail::marked_formulas_analyzed(s, ctx.mode, true)) return false;
  if (!is_saturated(s, ctx)) return false;
  bool work = !marked_succ_implications(s).empty();
  if (ctx.mode != Mode::Prop) work = work || !marked_succ_universals(s).empty();
  if (ctx.mode == Mode::Full)
    work = work || has_unmarked_ante_forall(s) || has_unmarked_succ_exists(s);
  return work;
}

// ---------------------------------------------------------------------------
// Inversions: bottom-up analysis of one marked formula, retaining the
// principal formula unmarked.

struct Inversion {
  Rule rule;
  Formula principal;
  std::vector<Sequent> uppers;
  std::vector<int> eigenvariables;
};

namespace detail {

inline Sequent retain_principal(const Sequent& s, bool in_antecedent,
                                const Formula& f) {
  Sequent r = s;
  Cedent& c = in_antecedent ? r.antecedent : r.succedent;
  c.erase(f);
  c.insert(f, false);
  return r;
}

}  // namespace detail

// The marked invertible formula Tr analyzes next: lexicographically least,
// antecedent before succedent.  Returns nothing when the sequent is a Tr
// leaf (axioms are handled by the caller).
inline std::optional<std::pair<bool, Formula>> pick_invertible(
    const Sequent& s, const TrContext& ctx) {
  for (const auto& [f, m] : s.antecedent) {
    if (!m) continue;
    switch (f.kind) {
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies:
        return std::make_pair(true, f);
      case Formula::Kind::Exists:
        if (ctx.mode != Mode::Prop) return std::make_pair(true, f);
        break;
      case Formula::Kind::Forall:
        if (ctx.mode != Mode::Prop) return std::make_pair(true, f);
        break;
      default:
        break;
    }
  }
  if (ctx.mode == Mode::Positive) {
    // An already unmarked antecedent universal goes stale when an
    // eigenvariable arrives later in the same Tr; re-pick it until its
    // instances are closed under the current terms.
    ErasedSequent e = erase_marks(s);
    for (const auto& [f, m] : s.antecedent)
      if (f.kind == Formula::Kind::Forall)
        for (const auto& t : detail::positive_domain(s))
          if (!e.antecedent.count(instantiate(f, t)))
            return std::make_pair(true, f);
  }
  for (const auto& [f, m] : s.succedent) {
    if (!m) continue;
    switch (f.kind) {
      case Formula::Kind::And:
      case Formula::Kind::Or:
        return std::make_pair(false, f);
      case Formula::Kind::Exists:
        if (ctx.mode == Mode::Full) return std::make_pair(false, f);
        break;
      default:
        break;  // succedent implications / universals are non-invertible
    }
  }
  return std::nullopt;
}

inline Inversion apply_inversion(const Sequent& s, bool in_antecedent,
                                 const Formula& f, TrContext& ctx) {
  Inversion inv;
  inv.principal = f;
  Sequent base = detail::retain_principal(s, in_antecedent, f);
  if (in_antecedent) {
    switch (f.kind) {
      case Formula::Kind::And: {
        inv.rule = Rule::AndL;
        Sequent u = base;
        u.antecedent.insert(f.left(), true);
        u.antecedent.insert(f.right(), true);
        inv.uppers.push_back(std::move(u));
        break;
      }
      case Formula::Kind::Or: {
        inv.rule = Rule::OrL;
        for (const Formula* g : {&f.left(), &f.right()}) {
          Sequent u = base;
          u.antecedent.insert(*g, true);
          inv.uppers.push_back(std::move(u));
        }
        break;
      }
      case Formula::Kind::Implies: {
        inv.rule = Rule::ImpL;
        Sequent l = base;
        l.succedent.insert(f.left(), true);
        Sequent r = base;
        r.antecedent.insert(f.right(), true);
        inv.uppers.push_back(std::move(l));
        inv.uppers.push_back(std::move(r));
        break;
      }
      case Formula::Kind::Exists: {
        inv.rule = Rule::ExL;
        // A witnessed existential is only unmarked; a fresh variable for
        // an instance that is already present would let re-marking loops
        // pump eigenvariables forever.
        if (detail::exists_witnessed(s, f, erase_marks(s).antecedent)) {
          inv.uppers.push_back(base);
          break;
        }
        int a = ctx.ledger->fresh();
        inv.eigenvariables.push_back(a);
        Sequent u = base;
        u.antecedent.insert(instantiate(f, Term::free(a)), true);
        inv.uppers.push_back(std::move(u));
        break;
      }
      case Formula::Kind::Forall: {
        inv.rule = Rule::AllL;
        Sequent u = base;
        std::vector<Term> ts = ctx.mode == Mode::Positive
                                   ? detail::positive_domain(s)
                                   : ctx.terms;
        for (const auto& t : ts) u.antecedent.insert(instantiate(f, t), true);
        inv.uppers.push_back(std::move(u));
        break;
      }
      default:
        assert(false && "not invertible");
    }
  } else {
    switch (f.kind) {
      case Formula::Kind::And: {
        inv.rule = Rule::AndR;
        for (const Formula* g : {&f.left(), &f.right()}) {
          Sequent u = base;
          u.succedent.insert(*g, true);
          inv.uppers.push_back(std::move(u));
        }
        break;
      }
      case Formula::Kind::Or: {
        inv.rule = Rule::OrR;
        Sequent u = base;
        u.succedent.insert(f.left(), true);
        u.succedent.insert(f.right(), true);
        inv.uppers.push_back(std::move(u));
        break;
      }
      case Formula::Kind::Exists: {
        inv.rule = Rule::ExR;
        Sequent u = base;
        for (const auto& t : ctx.terms)
          u.succedent.insert(instantiate(f, t), true);
        inv.uppers.push_back(std::move(u));
        break;
      }
      default:
        assert(false && "not invertible");
    }
  }
  return inv;
}

// Bottom-up deduction Tr_S: invert while an inversion can be performed,
// stopping early at axioms.  Leaves are saturated sequents: axioms,
// fully analyzed sequents, or non-invertible ones.
inline DeductionTree build_tr(const Sequent& s, TrContext& ctx) {
  DeductionTree node;
  node.seq = s;
  if (is_axiom(s)) return node;
  auto pick = pick_invertible(s, ctx);
  if (!pick) return node;
  Inversion inv = apply_inversion(s, pick->first, pick->second, ctx);
  node.rule = inv.rule;
  for (const auto& u : inv.uppers) node.children.push_back(build_tr(u, ctx));
  return node;
}

// ---------------------------------------------------------------------------
// The branching rule (br): all ways to analyze a non-invertible sequent.

struct BranchUpper {
  Rule rule;          // ImpR or AllR: the single inference a derivable
                      // upper sequent would justify
  Formula principal;  // the succedent formula analyzed
  Sequent seq;
  int eigenvariable = -1;  // AllR only
};

struct Branching {
  std::optional<Sequent> continued;  // Full mode: postponed instantiations
  std::vector<BranchUpper> uppers;
};

namespace detail {

// Antecedent with unmarked implications (and universal formulas, outside
// Prop mode) re-marked for re-analysis.
inline Cedent remarked_antecedent(const Sequent& s, Mode mode) {
  Cedent out;
  for (const auto& [f, m] : s.antecedent) {
    bool remark = !m && (f.kind == Formula::Kind::Implies ||
                         (mode != Mode::Prop && f.kind == Formula::Kind::Forall));
    out.insert(f, m || remark);
  }
  return out;
}

}  // namespace detail

inline Branching branch_rule(const Sequent& s, const TrContext& ctx) {
  assert(is_non_invertible(s, ctx));
  Branching br;
  if (ctx.mode == Mode::Full &&
      (has_unmarked_ante_forall(s) || has_unmarked_succ_exists(s))) {
    Sequent cont;
    for (const auto& [f, m] : s.antecedent)
      cont.antecedent.insert(f, m || f.kind == Formula::Kind::Forall);
    for (const auto& [f, m] : s.succedent)
      cont.succedent.insert(f, m || f.kind == Formula::Kind::Exists);
    br.continued = std::move(cont);
  }
  Cedent gamma = detail::remarked_antecedent(s, ctx.mode);
  for (const auto& f : marked_succ_implications(s)) {
    BranchUpper u;
    u.rule = Rule::ImpR;
    u.principal = f;
    u.seq.antecedent = gamma;
    u.seq.antecedent.insert(f.left(), true);
    u.seq.succedent.insert(f.right(), true);
    br.uppers.push_back(std::move(u));
  }
  if (ctx.mode != Mode::Prop) {
    for (const auto& f : marked_succ_universals(s)) {
      BranchUpper u;
      u.rule = Rule::AllR;
      u.principal = f;
      u.eigenvariable = ctx.ledger->fresh();
      u.seq.antecedent = gamma;
      u.seq.succedent.insert(instantiate(f, Term::free(u.eigenvariable)), true);
      br.uppers.push_back(std::move(u));
    }
  }
  return br;
}

// The (br) step as a deduction node: lower sequent with all upper
// sequents (continued first when present).
inline DeductionTree branching_deduction(const Sequent& s, const Branching& br) {
  DeductionTree d;
  d.seq = s;
  d.rule = Rule::Br;
  if (br.continued) {
    DeductionTree c;
    c.seq = *br.continued;
    d.children.push_back(std::move(c));
  }
  for (const auto& u : br.uppers) {
    DeductionTree c;
    c.seq = u.seq;
    d.children.push_back(std::move(c));
  }
  return d;
}

}  // namespace seqcalc
