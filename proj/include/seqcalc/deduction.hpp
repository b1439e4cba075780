#pragma once

#include <string>
#include <vector>

#include "seqcalc/sequent.hpp"

namespace seqcalc {

enum class Rule {
  Leaf,    // unexamined leaf; in deductions leaves may be any sequents
  AxiomT,  // common atom
  AxiomBot,
  OrL,
  OrR,
  AndL,
  AndR,
  ImpL,
  ImpR,
  ExL,
  ExR,
  AllL,
  AllR,
  Br,
  Wbr,
  Circ,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Leaf: return "leaf";
    case Rule::AxiomT: return "axiom-T";
    case Rule::AxiomBot: return "axiom-bot";
    case Rule::OrL: return "or-left";
    case Rule::OrR: return "or-right";
    case Rule::AndL: return "and-left";
    case Rule::AndR: return "and-right";
    case Rule::ImpL: return "imp-left";
    case Rule::ImpR: return "imp-right";
    case Rule::ExL: return "exists-left";
    case Rule::ExR: return "exists-right";
    case Rule::AllL: return "forall-left";
    case Rule::AllR: return "forall-right";
    case Rule::Br: return "br";
    case Rule::Wbr: return "wbr";
    case Rule::Circ: return "remark";
  }
  return "?";
}

inline Rule rule_from_name(const std::string& s) {
  for (Rule r : {Rule::Leaf, Rule::AxiomT, Rule::AxiomBot, Rule::OrL,
                 Rule::OrR, Rule::AndL, Rule::AndR, Rule::ImpL, Rule::ImpR,
                 Rule::ExL, Rule::ExR, Rule::AllL, Rule::AllR, Rule::Br,
                 Rule::Wbr, Rule::Circ})
    if (s == rule_name(r)) return r;
  throw std::runtime_error("unknown rule name: " + s);
}

// A labelled finite tree of sequents: the node's rule has the node's
// sequent as lower sequent and the children as upper sequents.
struct DeductionTree {
  Sequent seq;
  Rule rule = Rule::Leaf;
  std::vector<DeductionTree> children;

  bool is_leaf() const { return children.empty(); }
};

inline int deduction_node_count(const DeductionTree& d) {
  int n = 1;
  for (const auto& c : d.children) n += deduction_node_count(c);
  return n;
}

// Left-to-right leaves.
inline void collect_leaves(DeductionTree& d, std::vector<DeductionTree*>& out) {
  if (d.is_leaf()) {
    out.push_back(&d);
    return;
  }
  for (auto& c : d.children) collect_leaves(c, out);
}

inline void collect_leaves(const DeductionTree& d,
                           std::vector<const DeductionTree*>& out) {
  if (d.is_leaf()) {
    out.push_back(&d);
    return;
  }
  for (const auto& c : d.children) collect_leaves(c, out);
}

}  // namespace seqcalc
