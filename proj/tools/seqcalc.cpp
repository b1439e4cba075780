// Command-line front end: decide sequents, emit checkable artifacts,
// run corpora, and re-verify emitted artifacts.
//
// Exit codes: 0 derivable, 1 underivable, 2 unknown, 3 parse error,
// 4 mode violation, 5 internal self-check failure.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "seqcalc/json_io.hpp"

using namespace seqcalc;

namespace {

constexpr int kExitDerivable = 0;
constexpr int kExitUnderivable = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitParse = 3;
constexpr int kExitMode = 4;
constexpr int kExitSelfCheck = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// The input argument is either an inline sequent or a path to a file
// holding one.
Sequent load_input(const std::string& input) {
  std::ifstream probe(input);
  if (probe.good()) return parse_sequent(trim(read_file(input)));
  return parse_sequent(input);
}

void print_derivation_text(const DeductionTree& d, int indent,
                           std::ostream& out) {
  out << std::string(indent * 2, ' ') << "[" << rule_name(d.rule) << "] "
      << to_string(d.seq) << "\n";
  for (const auto& c : d.children) print_derivation_text(c, indent + 1, out);
}

void print_model_text(const PropKripkeModel& m, std::ostream& out) {
  out << "worlds: " << m.size() << ", root w" << m.root << "\n";
  for (int w = 0; w < m.size(); ++w) {
    out << "  w" << w << ":";
    for (const auto& a : m.valuation[w]) out << " " << a;
    out << "\n";
  }
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (i != j && m.le[i][j]) out << "  w" << i << " <= w" << j << "\n";
}

void print_model_text(const PredKripkeModel& m, std::ostream& out) {
  out << "worlds: " << m.size() << ", root w" << m.root << "\n";
  for (int w = 0; w < m.size(); ++w) {
    out << "  w" << w << " domain:";
    for (const auto& t : m.domain[w]) out << " " << term_to_string(t);
    out << "  facts:";
    for (const auto& f : m.facts[w]) out << " " << to_string(f);
    out << "\n";
  }
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j)
      if (i != j && m.le[i][j]) out << "  w" << i << " <= w" << j << "\n";
}

struct Options {
  std::string mode;   // "", "prop", "positive", "full"
  int depth = -1;
  bool pspace = false;
  std::string emit = "all";
  std::string format = "text";
};

// Resolves the run mode, enforcing the config invariants.  Returns
// nonzero exit code on violation.
int resolve_mode(const Sequent& s, const Options& opt, Mode& mode, int& depth) {
  if (opt.mode.empty()) {
    mode = detect_mode(s);
  } else {
    auto m = mode_from_name(opt.mode);
    if (!m) {
      std::cerr << "error: unknown mode '" << opt.mode << "'\n";
      return kExitMode;
    }
    mode = *m;
  }
  if (mode == Mode::Positive && !is_positive_sequent(s)) {
    std::cerr << "error: sequent is not positive";
    if (auto d = positivity_diagnostic(s)) std::cerr << ": " << *d;
    std::cerr << "\n";
    return kExitMode;
  }
  if (mode == Mode::Prop) {
    bool pred = false;
    auto scan = [&](const Cedent& c) {
      for (const auto& [f, m] : c)
        pred |= has_predicate(f) || has_quantifier(f);
    };
    scan(s.antecedent);
    scan(s.succedent);
    if (pred) {
      std::cerr << "error: prop mode requires a propositional sequent\n";
      return kExitMode;
    }
  }
  if (opt.pspace && mode == Mode::Full) {
    std::cerr << "error: --pspace applies to prop and positive modes only\n";
    return kExitMode;
  }
  if (mode == Mode::Full) {
    if (!opt.mode.empty() && opt.depth < 0) {
      std::cerr << "error: --mode full requires --depth\n";
      return kExitMode;
    }
    depth = opt.depth < 0 ? 8 : opt.depth;
  } else {
    if (opt.depth >= 0) {
      std::cerr << "error: --depth applies to full mode only\n";
      return kExitMode;
    }
    depth = 0;
  }
  return 0;
}

// Re-verifies a decision's artifacts before anything is emitted.
std::optional<std::string> self_check(const Decision& d, const Sequent& goal) {
  if (d.verdict == Verdict::Derivable) {
    if (!d.derivation) return "derivable verdict without derivation";
    return check_derivation_of(*d.derivation, unmark(mark_all(goal)));
  }
  if (d.verdict == Verdict::Underivable) {
    if (d.prop_model) {
      if (auto e = validate(d.prop_model->model)) return e;
      if (!falsifies(d.prop_model->model, goal))
        return std::optional<std::string>("model does not falsify the goal");
      return std::nullopt;
    }
    if (d.pred_model) {
      if (auto e = validate(d.pred_model->model)) return e;
      if (!falsifies(d.pred_model->model, goal))
        return std::optional<std::string>("model does not falsify the goal");
      return std::nullopt;
    }
    return "underivable verdict without countermodel";
  }
  return std::nullopt;
}

void emit(const Decision& d, const Sequent& goal, const Options& opt,
          std::ostream& out) {
  bool want_der = opt.emit == "derivation" || opt.emit == "all";
  bool want_mod = opt.emit == "model" || opt.emit == "all";
  bool want_stats = opt.emit == "stats" || opt.emit == "all";
  if (opt.format == "json") {
    if (opt.emit == "derivation" && d.derivation) {
      out << derivation_to_json(*d.derivation, goal).dump(2) << "\n";
    } else if (opt.emit == "model" && d.prop_model) {
      out << model_to_json(d.prop_model->model, goal).dump(2) << "\n";
    } else if (opt.emit == "model" && d.pred_model) {
      out << model_to_json(d.pred_model->model, goal).dump(2) << "\n";
    } else if (opt.emit == "stats" && d.pspace_stats) {
      out << stats_to_json(*d.pspace_stats).dump(2) << "\n";
    } else if (opt.emit == "stats" && d.full_stats) {
      out << stats_to_json(*d.full_stats).dump(2) << "\n";
    } else {
      out << decision_to_json(d, goal).dump(2) << "\n";
    }
    return;
  }
  if (opt.format == "dot") {
    if (d.derivation && want_der)
      out << derivation_to_dot(*d.derivation);
    else if (d.prop_model && want_mod)
      out << model_to_dot(d.prop_model->model);
    else if (d.pred_model && want_mod)
      out << model_to_dot(d.pred_model->model);
    else
      out << "// no " << opt.emit << " artifact for this verdict\n";
    return;
  }
  out << verdict_name(d.verdict) << " (" << mode_name(d.mode) << " mode)\n";
  if (!d.note.empty()) out << "note: " << d.note << "\n";
  if (want_der && d.derivation) print_derivation_text(*d.derivation, 0, out);
  if (want_mod && d.prop_model) print_model_text(d.prop_model->model, out);
  if (want_mod && d.pred_model) print_model_text(d.pred_model->model, out);
  if (want_stats) {
    out << "nodes: " << d.nodes << "\n";
    if (d.pspace_stats)
      out << "pspace: max_record_size=" << d.pspace_stats->max_branch_size
          << " branch_max_len=" << d.pspace_stats->max_branch_length
          << " nodes_visited=" << d.pspace_stats->nodes_visited << "\n";
    if (d.full_stats)
      out << "full: stages=" << d.full_stats->stages
          << " deduction_nodes=" << d.full_stats->deduction_nodes << "\n";
  }
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Derivable: return kExitDerivable;
    case Verdict::Underivable: return kExitUnderivable;
    case Verdict::Unknown: return kExitUnknown;
  }
  return kExitUnknown;
}

int cmd_prove(const std::string& input, const Options& opt) {
  Sequent s;
  try {
    s = load_input(input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  Mode mode;
  int depth;
  if (int rc = resolve_mode(s, opt, mode, depth)) return rc;
  Decision d = decide(s, mode, depth, opt.pspace);
  if (auto err = self_check(d, s)) {
    std::cerr << "internal error: artifact failed self-check: " << *err << "\n";
    return kExitSelfCheck;
  }
  emit(d, s, opt, std::cout);
  return verdict_exit(d.verdict);
}

struct CorpusLine {
  int number = 0;
  std::string text;           // sequent source
  std::string expected;       // "", "derivable", "underivable", "unknown"
  std::string report;
  bool failed = false;
  long long record_size = -1;
  long long input_size = 0;
};

void run_corpus_line(CorpusLine& line, const Options& opt) {
  Sequent s;
  try {
    s = parse_sequent(line.text);
  } catch (const ParseError& e) {
    line.report = "parse error: " + std::string(e.what());
    line.failed = true;
    return;
  }
  Mode mode;
  int depth;
  std::ostringstream diag;
  {
    // resolve_mode reports to stderr; capture per line instead.
    std::streambuf* old = std::cerr.rdbuf(diag.rdbuf());
    int rc = resolve_mode(s, opt, mode, depth);
    std::cerr.rdbuf(old);
    if (rc) {
      line.report = "mode violation: " + trim(diag.str());
      line.failed = true;
      return;
    }
  }
  Decision d = decide(s, mode, depth, opt.pspace);
  std::string verdict = verdict_name(d.verdict);
  line.report = verdict;
  if (auto err = self_check(d, s)) {
    line.report += " [self-check FAILED: " + *err + "]";
    line.failed = true;
    return;
  }
  if (d.verdict != Verdict::Unknown) line.report += " [self-check ok]";
  if (opt.pspace && d.pspace_stats) {
    if (d.pspace_stats->derivable != (d.verdict == Verdict::Derivable)) {
      line.report += " [pspace traversal DISAGREES]";
      line.failed = true;
      return;
    }
    line.record_size = d.pspace_stats->max_branch_size;
    line.input_size = sequent_size(mark_all(s));
  }
  if (!line.expected.empty() && line.expected != verdict) {
    line.report += " [expected " + line.expected + "]";
    line.failed = true;
  }
}

int cmd_corpus(const std::string& path, const Options& opt) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  std::vector<CorpusLine> lines;
  {
    std::istringstream in(content);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      std::string text = raw, expected;
      size_t hash = raw.find('#');
      if (hash != std::string::npos) {
        text = raw.substr(0, hash);
        std::string comment = trim(raw.substr(hash + 1));
        if (comment.rfind("expected:", 0) == 0)
          expected = trim(comment.substr(9));
      }
      text = trim(text);
      if (text.empty()) continue;
      CorpusLine line;
      line.number = number;
      line.text = text;
      line.expected = expected;
      if (!expected.empty() && expected != "derivable" &&
          expected != "underivable" && expected != "unknown") {
        line.report = "malformed expectation '" + expected + "'";
        line.failed = true;
      }
      lines.push_back(std::move(line));
    }
  }
  int jobs = 1;
  if (const char* env = std::getenv("SEQCALC_JOBS")) jobs = std::atoi(env);
  if (jobs < 1) jobs = 1;
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= lines.size()) return;
      if (!lines[i].failed) run_corpus_line(lines[i], opt);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  int failures = 0;
  for (const auto& line : lines) {
    std::cout << "line " << line.number << ": " << line.text << " -> "
              << line.report << "\n";
    if (line.failed) ++failures;
  }
  if (opt.pspace) {
    std::cout << "\nmax_record_size table (input size / record size):\n";
    for (const auto& line : lines)
      if (line.record_size >= 0)
        std::cout << "  line " << line.number << ": " << line.input_size
                  << " / " << line.record_size << "\n";
  }
  std::cout << "\n" << (lines.size() - failures) << "/" << lines.size()
            << " lines ok\n";
  return failures == 0 ? 0 : 1;
}

int cmd_check(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  try {
    // A decision wraps its artifacts; check whichever are present.
    std::optional<std::string> err;
    if (j.is_object() && j.value("kind", "") == "decision") {
      bool any = false;
      if (j.contains("derivation")) {
        any = true;
        json der = {{"schema", kSchema},
                    {"kind", "derivation"},
                    {"goal", j.at("goal")},
                    {"root", j.at("derivation")}};
        err = check_artifact(der);
      }
      if (!err && j.contains("model")) {
        any = true;
        err = check_artifact(j.at("model"));
      }
      if (!any) err = "decision carries no checkable artifact";
    } else {
      err = check_artifact(j);
    }
    if (err) {
      std::cout << "invalid: " << *err << "\n";
      return 1;
    }
    std::cout << "valid\n";
    return 0;
  } catch (const ArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof search for intuitionistic multi-succedent sequent calculi"};
  app.require_subcommand(1);

  Options opt;
  std::string input, corpus_path, artifact_path;

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", opt.mode, "prop|positive|full (default: auto)")
        ->check(CLI::IsMember({"prop", "positive", "full"}));
    cmd->add_option("--depth", opt.depth, "stage budget (full mode)");
    cmd->add_flag("--pspace", opt.pspace,
                  "low-memory traversal with space stats (prop/positive)");
  };

  CLI::App* prove = app.add_subcommand("prove", "decide one sequent");
  prove->add_option("input", input, "sequent text or path to a file")
      ->required();
  add_run_flags(prove);
  prove->add_option("--emit", opt.emit, "derivation|model|stats|all")
      ->check(CLI::IsMember({"derivation", "model", "stats", "all"}));
  prove->add_option("--format", opt.format, "text|json|dot")
      ->check(CLI::IsMember({"text", "json", "dot"}));

  CLI::App* corpus = app.add_subcommand("corpus", "decide a file of sequents");
  corpus->add_option("path", corpus_path, "one sequent per line")->required();
  add_run_flags(corpus);

  CLI::App* check = app.add_subcommand("check", "re-verify an emitted artifact");
  check->add_option("path", artifact_path, "JSON artifact")->required();

  CLI11_PARSE(app, argc, argv);

  if (prove->parsed()) return cmd_prove(input, opt);
  if (corpus->parsed()) return cmd_corpus(corpus_path, opt);
  return cmd_check(artifact_path);
}
