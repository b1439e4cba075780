#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqcalc/check.hpp"
#include "seqcalc/decide.hpp"
#include "seqcalc/parser.hpp"

namespace seqcalc {

// JSON artifacts carry goal-level data only: marks are a search-internal
// notion and every emitted sequent or formula is in erased form, printed
// so that the parser accepts it back verbatim.

inline constexpr const char* kSchema = "seqcalc/v1";

using json = nlohmann::json;

struct ArtifactError : std::runtime_error {
  explicit ArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- emit ----

namespace detail {

inline json deduction_to_json(const DeductionTree& d) {
  json node;
  node["sequent"] = to_string(d.seq);
  node["rule"] = rule_name(d.rule);
  node["children"] = json::array();
  for (const auto& c : d.children)
    node["children"].push_back(deduction_to_json(c));
  return node;
}

inline json edges_to_json(const std::vector<std::vector<bool>>& le) {
  json edges = json::array();
  int n = static_cast<int>(le.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && le[i][j]) edges.push_back(json::array({i, j}));
  return edges;
}

}  // namespace detail

inline json derivation_to_json(const DeductionTree& d, const Sequent& goal) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "derivation";
  out["goal"] = to_string(goal);
  out["root"] = detail::deduction_to_json(d);
  return out;
}

inline json model_to_json(const PropKripkeModel& m, const Sequent& goal) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "model";
  out["goal"] = to_string(goal);
  out["root"] = m.root;
  out["worlds"] = json::array();
  for (int w = 0; w < m.size(); ++w) {
    json world;
    world["id"] = w;
    world["atoms"] = json::array();
    for (const auto& a : m.valuation[w]) world["atoms"].push_back(a);
    out["worlds"].push_back(std::move(world));
  }
  out["edges"] = detail::edges_to_json(m.le);
  return out;
}

inline json model_to_json(const PredKripkeModel& m, const Sequent& goal) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "model";
  out["goal"] = to_string(goal);
  out["root"] = m.root;
  out["worlds"] = json::array();
  for (int w = 0; w < m.size(); ++w) {
    json world;
    world["id"] = w;
    world["atoms"] = json::array();
    world["domain"] = json::array();
    for (const auto& t : m.domain[w]) world["domain"].push_back(term_to_string(t));
    std::map<std::string, json> rels;
    for (const auto& f : m.facts[w]) {
      if (f.args.empty()) {
        world["atoms"].push_back(f.pred);
        continue;
      }
      json row = json::array();
      for (const auto& t : f.args) row.push_back(term_to_string(t));
      auto [it, fresh] = rels.emplace(f.pred, json::array());
      it->second.push_back(std::move(row));
    }
    world["relations"] = json::object();
    for (auto& [name, rows] : rels) world["relations"][name] = std::move(rows);
    out["worlds"].push_back(std::move(world));
  }
  out["edges"] = detail::edges_to_json(m.le);
  return out;
}

inline json stats_to_json(const PspaceStats& s) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "stats";
  out["pspace"] = {{"max_record_size", s.max_branch_size},
                   {"branch_max_len", s.max_branch_length},
                   {"nodes_visited", s.nodes_visited}};
  return out;
}

inline json stats_to_json(const StagedStats& s) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "stats";
  out["full"] = {{"stages", s.stages},
                 {"node_count", s.node_count},
                 {"deduction_nodes", s.deduction_nodes}};
  return out;
}

inline json decision_to_json(const Decision& d, const Sequent& goal) {
  json out;
  out["schema"] = kSchema;
  out["kind"] = "decision";
  out["goal"] = to_string(goal);
  out["mode"] = mode_name(d.mode);
  out["verdict"] = verdict_name(d.verdict);
  out["nodes"] = d.nodes;
  if (!d.note.empty()) out["note"] = d.note;
  if (d.derivation) out["derivation"] = detail::deduction_to_json(*d.derivation);
  if (d.prop_model) out["model"] = model_to_json(d.prop_model->model, goal);
  if (d.pred_model) out["model"] = model_to_json(d.pred_model->model, goal);
  if (d.pspace_stats)
    out["pspace"] = stats_to_json(*d.pspace_stats)["pspace"];
  if (d.full_stats) out["full"] = stats_to_json(*d.full_stats)["full"];
  return out;
}

// ---- parse back ----

namespace detail {

inline const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ArtifactError(std::string("missing field '") + key + "'");
  return *it;
}

inline void check_schema(const json& j, const char* kind) {
  if (!j.is_object()) throw ArtifactError("artifact is not a JSON object");
  if (field(j, "schema").get<std::string>() != kSchema)
    throw ArtifactError("unrecognized schema");
  if (field(j, "kind").get<std::string>() != kind)
    throw ArtifactError(std::string("expected kind '") + kind + "'");
}

inline DeductionTree json_to_deduction(const json& j) {
  DeductionTree d;
  try {
    d.seq = parse_sequent(field(j, "sequent").get<std::string>());
  } catch (const ParseError& e) {
    throw ArtifactError(std::string("bad sequent in derivation: ") + e.what());
  }
  try {
    d.rule = rule_from_name(field(j, "rule").get<std::string>());
  } catch (const std::runtime_error& e) {
    throw ArtifactError(e.what());
  }
  for (const auto& c : field(j, "children")) d.children.push_back(json_to_deduction(c));
  return d;
}

inline Term parse_term(const std::string& text) {
  Parser p(text);
  Term t = p.term();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

inline std::vector<std::vector<bool>> json_to_order(const json& j, int n) {
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) le[i][i] = true;
  for (const auto& e : field(j, "edges")) {
    if (!e.is_array() || e.size() != 2)
      throw ArtifactError("edge is not a pair");
    int a = e[0].get<int>(), b = e[1].get<int>();
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw ArtifactError("edge references unknown world");
    le[a][b] = true;
  }
  // Closure is implied by the artifact; restore it.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (le[i][k])
        for (int j2 = 0; j2 < n; ++j2)
          if (le[k][j2]) le[i][j2] = true;
  return le;
}

}  // namespace detail

struct ParsedDerivation {
  Sequent goal;
  DeductionTree root;
};

inline ParsedDerivation json_to_derivation(const json& j) {
  detail::check_schema(j, "derivation");
  ParsedDerivation out;
  try {
    out.goal = parse_sequent(detail::field(j, "goal").get<std::string>());
  } catch (const ParseError& e) {
    throw ArtifactError(std::string("bad goal: ") + e.what());
  }
  out.root = detail::json_to_deduction(detail::field(j, "root"));
  return out;
}

struct ParsedModel {
  Sequent goal;
  bool predicate = false;  // any world carries a domain or relations
  PropKripkeModel prop;
  PredKripkeModel pred;
};

inline ParsedModel json_to_model(const json& j) {
  detail::check_schema(j, "model");
  ParsedModel out;
  try {
    out.goal = parse_sequent(detail::field(j, "goal").get<std::string>());
  } catch (const ParseError& e) {
    throw ArtifactError(std::string("bad goal: ") + e.what());
  }
  const json& worlds = detail::field(j, "worlds");
  int n = static_cast<int>(worlds.size());
  if (n == 0) throw ArtifactError("model has no worlds");
  for (const auto& w : worlds) out.predicate |= w.contains("domain");
  int root = detail::field(j, "root").get<int>();
  if (root < 0 || root >= n) throw ArtifactError("root is not a world id");
  auto le = detail::json_to_order(j, n);
  if (out.predicate) {
    out.pred.root = root;
    out.pred.le = le;
    out.pred.domain.resize(n);
    out.pred.facts.resize(n);
  } else {
    out.prop.root = root;
    out.prop.le = le;
    out.prop.valuation.resize(n);
  }
  for (const auto& w : worlds) {
    int id = detail::field(w, "id").get<int>();
    if (id < 0 || id >= n) throw ArtifactError("world id out of range");
    for (const auto& a : detail::field(w, "atoms")) {
      std::string name = a.get<std::string>();
      if (out.predicate)
        out.pred.facts[id].insert(Formula::atom(name, {}));
      else
        out.prop.valuation[id].insert(name);
    }
    if (!out.predicate) continue;
    try {
      for (const auto& t : detail::field(w, "domain"))
        out.pred.domain[id].push_back(detail::parse_term(t.get<std::string>()));
      if (w.contains("relations"))
        for (const auto& [name, rows] : w["relations"].items())
          for (const auto& row : rows) {
            std::vector<Term> args;
            for (const auto& t : row)
              args.push_back(detail::parse_term(t.get<std::string>()));
            out.pred.facts[id].insert(Formula::atom(name, std::move(args)));
          }
    } catch (const ParseError& e) {
      throw ArtifactError(std::string("bad term in model: ") + e.what());
    }
  }
  return out;
}

// ---- re-verification (cmd_check) ----

inline std::optional<std::string> check_artifact(const json& j) {
  if (!j.is_object()) return "artifact is not a JSON object";
  auto it = j.find("kind");
  if (it == j.end()) return "missing field 'kind'";
  std::string kind = it->get<std::string>();
  if (kind == "derivation") {
    ParsedDerivation d = json_to_derivation(j);
    return check_derivation_of(d.root, d.goal);
  }
  if (kind == "model") {
    ParsedModel m = json_to_model(j);
    if (m.predicate) {
      if (auto e = validate(m.pred)) return e;
      if (!falsifies(m.pred, m.goal))
        return std::optional<std::string>("model does not falsify the goal");
    } else {
      if (auto e = validate(m.prop)) return e;
      if (!falsifies(m.prop, m.goal))
        return std::optional<std::string>("model does not falsify the goal");
    }
    return std::nullopt;
  }
  throw ArtifactError("unknown artifact kind '" + kind + "'");
}

// ---- DOT export ----

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline void deduction_to_dot(const DeductionTree& d, int& next,
                             std::string& out) {
  int id = next++;
  out += "  n" + std::to_string(id) + " [label=\"" + dot_escape(to_string(d.seq)) +
         "\\n(" + rule_name(d.rule) + ")\"];\n";
  for (const auto& c : d.children) {
    int child = next;
    deduction_to_dot(c, next, out);
    out += "  n" + std::to_string(id) + " -> n" + std::to_string(child) + ";\n";
  }
}

}  // namespace detail

inline std::string derivation_to_dot(const DeductionTree& d) {
  std::string out = "digraph derivation {\n  node [shape=box];\n";
  int next = 0;
  detail::deduction_to_dot(d, next, out);
  out += "}\n";
  return out;
}

inline std::string model_to_dot(const PropKripkeModel& m) {
  std::string out = "digraph model {\n  node [shape=ellipse];\n";
  for (int w = 0; w < m.size(); ++w) {
    std::string label = "w" + std::to_string(w) + ":";
    for (const auto& a : m.valuation[w]) label += " " + a;
    out += "  w" + std::to_string(w) + " [label=\"" + detail::dot_escape(label) +
           "\"" + (w == m.root ? ", style=bold" : "") + "];\n";
  }
  // Show only the covering edges; the order is the closure.
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      if (i == j || !m.le[i][j]) continue;
      bool covered = false;
      for (int k = 0; k < m.size() && !covered; ++k)
        covered = k != i && k != j && m.le[i][k] && m.le[k][j];
      if (!covered)
        out += "  w" + std::to_string(i) + " -> w" + std::to_string(j) + ";\n";
    }
  out += "}\n";
  return out;
}

inline std::string model_to_dot(const PredKripkeModel& m) {
  std::string out = "digraph model {\n  node [shape=ellipse];\n";
  for (int w = 0; w < m.size(); ++w) {
    std::string label = "w" + std::to_string(w) + "\\ndom:";
    for (const auto& t : m.domain[w]) label += " " + term_to_string(t);
    label += "\\n";
    bool first = true;
    for (const auto& f : m.facts[w]) {
      if (!first) label += ", ";
      first = false;
      label += to_string(f);
    }
    out += "  w" + std::to_string(w) + " [label=\"" + detail::dot_escape(label) +
           "\"" + (w == m.root ? ", style=bold" : "") + "];\n";
  }
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) {
      if (i == j || !m.le[i][j]) continue;
      bool covered = false;
      for (int k = 0; k < m.size() && !covered; ++k)
        covered = k != i && k != j && m.le[i][k] && m.le[k][j];
      if (!covered)
        out += "  w" + std::to_string(i) + " -> w" + std::to_string(j) + ";\n";
    }
  out += "}\n";
  return out;
}

}  // namespace seqcalc
