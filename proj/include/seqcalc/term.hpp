#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqcalc {

// Free variables a0, a1, ... and bound variables x, y, ... live in
// disjoint alphabets.  There are no individual constants: every ground
// term bottoms out in free variables.
struct Term {
  enum class Kind { Free, Bound, App };

  Kind kind = Kind::Free;
  int index = 0;            // Kind::Free
  std::string name;         // Kind::Bound (variable) or Kind::App (function symbol)
  std::vector<Term> args;   // Kind::App

  static Term free(int i) {
    Term t;
    t.kind = Kind::Free;
    t.index = i;
    return t;
  }
  static Term bound(std::string n) {
    Term t;
    t.kind = Kind::Bound;
    t.name = std::move(n);
    return t;
  }
  static Term app(std::string fn, std::vector<Term> as) {
    Term t;
    t.kind = Kind::App;
    t.name = std::move(fn);
    t.args = std::move(as);
    return t;
  }
};

inline int cmp(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::Free:
      return a.index < b.index ? -1 : a.index > b.index ? 1 : 0;
    case Term::Kind::Bound:
      return a.name.compare(b.name) < 0 ? -1 : a.name == b.name ? 0 : 1;
    case Term::Kind::App: {
      if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
      for (size_t i = 0; i < a.args.size() && i < b.args.size(); ++i)
        if (int c = cmp(a.args[i], b.args[i])) return c;
      return a.args.size() < b.args.size() ? -1
           : a.args.size() > b.args.size() ? 1 : 0;
    }
  }
  return 0;
}

inline bool operator==(const Term& a, const Term& b) { return cmp(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return cmp(a, b) != 0; }
inline bool operator<(const Term& a, const Term& b) { return cmp(a, b) < 0; }

inline int term_node_count(const Term& t) {
  int n = 1;
  for (const auto& a : t.args) n += term_node_count(a);
  return n;
}

// Binary length of n; the variable a_n costs |n| symbols.
inline int bit_length(int n) {
  int len = 1;
  while (n > 1) {
    n >>= 1;
    ++len;
  }
  return len;
}

inline int term_size(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Free:
      return bit_length(t.index);
    case Term::Kind::Bound:
      return 1;
    case Term::Kind::App: {
      int n = 1;
      for (const auto& a : t.args) n += term_size(a);
      return n;
    }
  }
  return 1;
}

inline void collect_free_vars(const Term& t, std::set<int>& out) {
  if (t.kind == Term::Kind::Free) out.insert(t.index);
  for (const auto& a : t.args) collect_free_vars(a, out);
}

inline bool term_over(const Term& t, const std::set<int>& vars) {
  if (t.kind == Term::Kind::Free) return vars.count(t.index) != 0;
  if (t.kind == Term::Kind::Bound) return false;
  return std::all_of(t.args.begin(), t.args.end(),
                     [&](const Term& a) { return term_over(a, vars); });
}

// Replace occurrences of the bound variable `x` by `t`.
inline Term subst_term(const Term& s, const std::string& x, const Term& t) {
  if (s.kind == Term::Kind::Bound && s.name == x) return t;
  if (s.kind == Term::Kind::App) {
    Term r = s;
    for (auto& a : r.args) a = subst_term(a, x, t);
    return r;
  }
  return s;
}

inline std::string term_to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Free:
      return "a" + std::to_string(t.index);
    case Term::Kind::Bound:
      return t.name;
    case Term::Kind::App: {
      std::string s = t.name + "(";
      for (size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ",";
        s += term_to_string(t.args[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

// Function and predicate arities, fixed by first use.
struct Signature {
  std::map<std::string, int> functions;
  std::map<std::string, int> predicates;

  bool function_free() const { return functions.empty(); }
};

namespace detail {

// All terms with node count <= depth over free variables {a_i : i < max_var},
// sorted by (node count, lexicographic order).
inline void terms_up_to(const Signature& sig, int depth, int max_var,
                        std::vector<Term>& out) {
  if (depth <= 0) return;
  std::vector<std::vector<Term>> by_size(depth + 1);
  for (int i = 0; i < max_var; ++i) by_size[1].push_back(Term::free(i));
  for (int sz = 2; sz <= depth; ++sz) {
    for (const auto& [fn, arity] : sig.functions) {
      // Distribute sz-1 nodes over `arity` argument slots.
      std::vector<Term> partial;
      std::vector<std::vector<Term>> tuples;
      std::vector<Term> cur;
      // Recursive enumeration of argument tuples with total size sz-1.
      auto rec = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == arity) {
          if (remaining == 0) tuples.push_back(cur);
          return;
        }
        int slots_left = arity - slot - 1;
        for (int s = 1; s + slots_left <= remaining; ++s) {
          for (const auto& t : by_size[s]) {
            cur.push_back(t);
            self(self, slot + 1, remaining - s);
            cur.pop_back();
          }
        }
      };
      rec(rec, 0, sz - 1);
      for (auto& tup : tuples) by_size[sz].push_back(Term::app(fn, tup));
    }
    std::sort(by_size[sz].begin(), by_size[sz].end());
  }
  for (int sz = 1; sz <= depth; ++sz)
    for (const auto& t : by_size[sz]) out.push_back(t);
}

}  // namespace detail

// One fixed global enumeration t_0, t_1, ... of all terms over all free
// variables.  Stratified: round r lists the not-yet-seen terms with node
// count <= r over variables a_0..a_{r-1}, ordered by node count then
// lexicographically.  Within any fixed finite variable set this refines
// the plain (node count, lex) order.
inline std::vector<Term> global_term_enumeration(const Signature& sig, int n) {
  std::vector<Term> out;
  std::set<Term> seen;
  for (int r = 1; static_cast<int>(out.size()) < n; ++r) {
    std::vector<Term> layer;
    detail::terms_up_to(sig, r, r, layer);
    for (const auto& t : layer) {
      if (static_cast<int>(out.size()) >= n) break;
      if (seen.insert(t).second) out.push_back(t);
    }
    if (sig.function_free() && r > n) break;  // nothing new can appear
  }
  return out;
}

// Members of Tm(A) among the first n terms of the global enumeration.
inline std::vector<Term> enumerate_terms(const Signature& sig,
                                         const std::set<int>& A, int n) {
  std::vector<Term> out;
  if (A.empty()) return out;  // no constants, Tm(empty) is empty
  for (const auto& t : global_term_enumeration(sig, n))
    if (term_over(t, A)) out.push_back(t);
  return out;
}

}  // namespace seqcalc
