#pragma once

#include <string>

#include "seqcalc/formula.hpp"

namespace seqcalc {

// ASCII grammar: precedence ~ > & > | > ->, with -> right-associative and
// quantifiers extending maximally to the right.  ~f abbreviates f -> bot.
namespace detail {

// Precedence levels: 0 = ->, 1 = |, 2 = &, 3 = unary/atom.
inline void print_formula(const Formula& f, int min_prec, std::string& out) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      out += f.pred;
      if (!f.args.empty()) {
        out += "(";
        for (size_t i = 0; i < f.args.size(); ++i) {
          if (i) out += ",";
          out += term_to_string(f.args[i]);
        }
        out += ")";
      }
      return;
    case Formula::Kind::Bottom:
      out += "bot";
      return;
    case Formula::Kind::Implies:
      if (f.sub[1].is_bottom()) {
        out += "~";
        print_formula(f.sub[0], 3, out);
        return;
      }
      if (min_prec > 0) out += "(";
      print_formula(f.sub[0], 1, out);
      out += " -> ";
      print_formula(f.sub[1], 0, out);
      if (min_prec > 0) out += ")";
      return;
    case Formula::Kind::Or:
      if (min_prec > 1) out += "(";
      print_formula(f.sub[0], 1, out);
      out += " | ";
      print_formula(f.sub[1], 2, out);
      if (min_prec > 1) out += ")";
      return;
    case Formula::Kind::And:
      if (min_prec > 2) out += "(";
      print_formula(f.sub[0], 2, out);
      out += " & ";
      print_formula(f.sub[1], 3, out);
      if (min_prec > 2) out += ")";
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (min_prec > 0) out += "(";
      out += f.kind == Formula::Kind::Exists ? "exists " : "forall ";
      out += f.var;
      out += ". ";
      print_formula(f.sub[0], 0, out);
      if (min_prec > 0) out += ")";
      return;
  }
}

}  // namespace detail

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print_formula(f, 0, out);
  return out;
}

}  // namespace seqcalc
