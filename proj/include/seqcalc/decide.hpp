#pragma once

#include <optional>
#include <string>

#include "seqcalc/pspace.hpp"
#include "seqcalc/staged.hpp"

namespace seqcalc {

// One entry point over the three modes.  Propositional and positive
// searches are total (derivable or a countermodel); the full mode is
// bounded by a stage budget and may answer Unknown.

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Prop: return "prop";
    case Mode::Positive: return "positive";
    case Mode::Full: return "full";
  }
  return "?";
}

inline std::optional<Mode> mode_from_name(const std::string& s) {
  if (s == "prop") return Mode::Prop;
  if (s == "positive") return Mode::Positive;
  if (s == "full") return Mode::Full;
  return std::nullopt;
}

inline Mode detect_mode(const Sequent& s) {
  bool pred = false, quant = false;
  auto scan = [&](const Cedent& c) {
    for (const auto& [f, m] : c) {
      pred |= has_predicate(f);
      quant |= has_quantifier(f);
    }
  };
  scan(s.antecedent);
  scan(s.succedent);
  if (!pred && !quant) return Mode::Prop;
  if (is_positive_sequent(s)) return Mode::Positive;
  return Mode::Full;
}

struct Decision {
  Mode mode = Mode::Prop;
  Verdict verdict = Verdict::Unknown;
  std::optional<DeductionTree> derivation;  // marks erased
  std::optional<CountermodelBuild> prop_model;
  std::optional<PredCountermodelBuild> pred_model;
  std::optional<PspaceStats> pspace_stats;
  std::optional<StagedStats> full_stats;
  long long nodes = 0;
  std::string note;
};

inline Decision decide(const Sequent& s, Mode mode, int depth = 8,
                       bool pspace = false, int max_nodes = 200000) {
  Decision out;
  out.mode = mode;
  if (mode == Mode::Full) {
    FullResult r = decide_full(s, depth, max_nodes);
    out.verdict = r.verdict;
    out.derivation = std::move(r.derivation);
    if (r.model) out.pred_model = std::move(r.model);
    out.full_stats = r.stats;
    out.nodes = r.stats.node_count;
    out.note = std::move(r.note);
    return out;
  }
  SearchTree t = build_search_tree(s, mode);
  out.nodes = search_node_count(*t.root);
  if (t.derivable()) {
    out.verdict = Verdict::Derivable;
    out.derivation = extract_derivation(t);
  } else {
    out.verdict = Verdict::Underivable;
    if (mode == Mode::Prop)
      out.prop_model = extract_countermodel(t);
    else
      out.pred_model = extract_pred_countermodel(t);
  }
  if (pspace) out.pspace_stats = decide_low_memory(s, mode);
  return out;
}

}  // namespace seqcalc
