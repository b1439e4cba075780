#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqcalc/printer.hpp"
#include "seqcalc/sequent.hpp"

namespace seqcalc {

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

namespace detail {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  Signature sig;
  std::vector<std::string> bound_stack;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      // Keep '|' and '|-' apart.
      if (tok == "|" && pos + 1 < text.size() && text[pos + 1] == '-')
        return false;
      pos += tok.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  bool at_ident() {
    skip_ws();
    return pos < text.size() &&
           std::isalpha(static_cast<unsigned char>(text[pos]));
  }

  std::string ident() {
    skip_ws();
    if (!at_ident()) fail("expected identifier");
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  static bool is_free_var_name(const std::string& s) {
    if (s.size() < 2 || s[0] != 'a') return false;
    for (size_t i = 1; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }

  bool is_bound(const std::string& name) const {
    for (const auto& b : bound_stack)
      if (b == name) return true;
    return false;
  }

  void check_arity(std::map<std::string, int>& table, const std::string& name,
                   int arity, size_t at) {
    auto [it, fresh] = table.emplace(name, arity);
    if (!fresh && it->second != arity)
      throw ParseError("arity mismatch for '" + name + "': declared " +
                           std::to_string(it->second) + ", used with " +
                           std::to_string(arity),
                       at);
  }

  Term term() {
    size_t at = pos;
    std::string name = ident();
    if (std::isupper(static_cast<unsigned char>(name[0])))
      throw ParseError("predicate symbol '" + name + "' in term position", at);
    if (eat("(")) {
      std::vector<Term> args;
      args.push_back(term());
      while (eat(",")) args.push_back(term());
      if (!eat(")")) fail("expected ')'");
      check_arity(sig.functions, name, static_cast<int>(args.size()), at);
      return Term::app(name, std::move(args));
    }
    if (is_free_var_name(name))
      return Term::free(std::stoi(name.substr(1)));
    if (!is_bound(name))
      throw ParseError("unbound variable '" + name + "'", at);
    return Term::bound(name);
  }

  Formula formula() { return implication(); }

  Formula implication() {
    Formula lhs = disjunction();
    if (eat("->")) return Formula::implies(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (eat("|")) f = Formula::disj(std::move(f), conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (eat("&")) f = Formula::conj(std::move(f), unary());
    return f;
  }

  Formula unary() {
    if (eat("~")) return Formula::neg(unary());
    if (eat("(")) {
      Formula f = formula();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    size_t at = pos;
    std::string name = ident();
    if (name == "bot") return Formula::bottom();
    if (name == "forall" || name == "exists") {
      std::string var = ident();
      if (std::isupper(static_cast<unsigned char>(var[0])) ||
          is_free_var_name(var))
        throw ParseError("invalid bound variable '" + var + "'", at);
      if (is_bound(var))
        throw ParseError("bound variable '" + var + "' would be captured", at);
      if (!eat(".")) fail("expected '.' after quantified variable");
      bound_stack.push_back(var);
      Formula body = formula();  // quantifier extends maximally right
      bound_stack.pop_back();
      return Formula::quant(name == "forall" ? Formula::Kind::Forall
                                             : Formula::Kind::Exists,
                            var, std::move(body));
    }
    if (std::isupper(static_cast<unsigned char>(name[0]))) {
      if (!eat("(")) fail("predicate '" + name + "' needs a term list");
      std::vector<Term> args;
      args.push_back(term());
      while (eat(",")) args.push_back(term());
      if (!eat(")")) fail("expected ')'");
      check_arity(sig.predicates, name, static_cast<int>(args.size()), at);
      return Formula::atom(name, std::move(args));
    }
    if (is_free_var_name(name))
      throw ParseError("free variable '" + name + "' in formula position", at);
    return Formula::atom(name);  // propositional variable
  }

  Cedent cedent(bool stop_at_turnstile) {
    Cedent c;
    skip_ws();
    while (true) {
      skip_ws();
      if (pos >= text.size()) break;
      if (stop_at_turnstile && text.compare(pos, 2, "|-") == 0) break;
      c.insert(formula(), /*marked=*/true);
      if (!eat(",")) break;
    }
    return c;
  }
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) {
  detail::Parser p(text);
  Formula f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

// Parse "cedent |- cedent"; every formula comes back marked, matching the
// all-marked root sequent of the search.
inline Sequent parse_sequent(const std::string& text) {
  detail::Parser p(text);
  Sequent s;
  s.antecedent = p.cedent(/*stop_at_turnstile=*/true);
  if (!p.eat("|-")) p.fail("expected '|-'");
  s.succedent = p.cedent(/*stop_at_turnstile=*/false);
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return s;
}

inline std::string to_string(const Cedent& c) {
  std::string out;
  bool first = true;
  for (const auto& [f, m] : c) {
    if (!first) out += ", ";
    first = false;
    out += to_string(f);
  }
  return out;
}

inline std::string to_string(const Sequent& s) {
  return to_string(s.antecedent) + " |- " + to_string(s.succedent);
}

// Debug form showing marks.
inline std::string to_string_marked(const Sequent& s) {
  auto ced = [](const Cedent& c) {
    std::string out;
    bool first = true;
    for (const auto& [f, m] : c) {
      if (!first) out += ", ";
      first = false;
      out += to_string(f);
      if (m) out += "*";
    }
    return out;
  };
  return ced(s.antecedent) + " |- " + ced(s.succedent);
}

}  // namespace seqcalc
