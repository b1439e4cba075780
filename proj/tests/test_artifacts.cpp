#include <catch2/catch_amalgamated.hpp>

#include "seqcalc/json_io.hpp"

using namespace seqcalc;

namespace {

void roundtrip(const std::string& text, Mode mode, int depth = 8) {
  Sequent s = parse_sequent(text);
  Decision d = decide(s, mode, depth, /*pspace=*/mode != Mode::Full);
  INFO(text);
  if (d.verdict == Verdict::Derivable) {
    json j = derivation_to_json(*d.derivation, s);
    json back = json::parse(j.dump());
    auto err = check_artifact(back);
    if (err) INFO(*err);
    CHECK_FALSE(err.has_value());
    CHECK(derivation_to_dot(*d.derivation).rfind("digraph", 0) == 0);
  } else if (d.verdict == Verdict::Underivable) {
    json j = d.prop_model ? model_to_json(d.prop_model->model, s)
                          : model_to_json(d.pred_model->model, s);
    json back = json::parse(j.dump());
    auto err = check_artifact(back);
    if (err) INFO(*err);
    CHECK_FALSE(err.has_value());
  }
  if (d.pspace_stats) {
    json j = stats_to_json(*d.pspace_stats);
    CHECK(j["pspace"].contains("max_record_size"));
    CHECK(j["pspace"].contains("branch_max_len"));
    CHECK(j["pspace"].contains("nodes_visited"));
  }
  json dj = decision_to_json(d, s);
  CHECK(dj["schema"] == kSchema);
  CHECK(dj["kind"] == "decision");
  CHECK(dj["mode"] == mode_name(mode));
}

}  // namespace

TEST_CASE("decision round trips in every mode") {
  roundtrip("|- p -> p", Mode::Prop);
  roundtrip("|- p | (p -> q)", Mode::Prop);
  roundtrip("|- ((p -> q) -> p) -> p", Mode::Prop);
  roundtrip("p -> q, q -> r |- p -> r", Mode::Prop);
  roundtrip("forall x. forall y. R(x,y) |- forall y. forall x. R(x,y)",
            Mode::Positive);
  roundtrip("P(a0) |- forall x. P(x)", Mode::Positive);
  roundtrip("forall x. P(x) |- exists y. P(y)", Mode::Full);
  roundtrip("exists y. P(y) |- forall x. P(x)", Mode::Full);
}

TEST_CASE("mode detection") {
  CHECK(detect_mode(parse_sequent("p, q |- r")) == Mode::Prop);
  CHECK(detect_mode(parse_sequent("|- ((p -> q) -> p) -> p")) == Mode::Prop);
  CHECK(detect_mode(parse_sequent("forall x. P(x) |- P(a0)")) ==
        Mode::Positive);
  CHECK(detect_mode(parse_sequent(
            "forall x. forall y. R(x,y) |- forall y. forall x. R(x,y)")) ==
        Mode::Positive);
  CHECK(detect_mode(parse_sequent("|- (forall x. P(x)) -> P(a0)")) ==
        Mode::Positive);
  CHECK(detect_mode(parse_sequent("|- exists y. P(y)")) == Mode::Full);
  CHECK(detect_mode(parse_sequent("forall x. exists y. R(x,y) |- p")) ==
        Mode::Full);
  CHECK(detect_mode(parse_sequent("|- ~~ forall x. (P(x) | ~P(x))")) ==
        Mode::Full);

  CHECK(mode_from_name("prop") == Mode::Prop);
  CHECK(mode_from_name("positive") == Mode::Positive);
  CHECK(mode_from_name("full") == Mode::Full);
  CHECK_FALSE(mode_from_name("classical").has_value());
  CHECK(mode_name(Mode::Full) == std::string("full"));
}

TEST_CASE("checker catches tampering") {
  Sequent s = parse_sequent("|- p -> p");
  Decision d = decide(s, Mode::Prop);
  REQUIRE(d.verdict == Verdict::Derivable);
  json good = derivation_to_json(*d.derivation, s);
  CHECK_FALSE(check_artifact(good).has_value());

  json wrong_goal = good;
  wrong_goal["goal"] = "|- q -> q";
  CHECK(check_artifact(wrong_goal).has_value());

  json wrong_rule = good;
  wrong_rule["root"]["rule"] = "axiom-T";
  CHECK(check_artifact(wrong_rule).has_value());

  // a model that does not falsify its goal is rejected
  Sequent em = parse_sequent("|- p | ~p");
  Decision dm = decide(em, Mode::Prop);
  REQUIRE(dm.verdict == Verdict::Underivable);
  json model = model_to_json(dm.prop_model->model, em);
  CHECK_FALSE(check_artifact(model).has_value());
  json bad_model = model;
  bad_model["goal"] = "|- p -> p";
  CHECK(check_artifact(bad_model).has_value());
}

TEST_CASE("schema and kind errors raise ArtifactError") {
  CHECK_THROWS_AS(
      check_artifact(json::parse(R"({"schema":"other","kind":"model"})")),
      ArtifactError);
  CHECK_THROWS_AS(check_artifact(json::parse(
                      R"({"schema":"seqcalc/v1","kind":"recipe"})")),
                  ArtifactError);
  CHECK_THROWS_AS(check_artifact(json::parse(R"({"kind":"model"})")),
                  ArtifactError);
}

TEST_CASE("model json carries closure-free edges") {
  Sequent s = parse_sequent("|- p | ~p");
  Decision d = decide(s, Mode::Prop);
  REQUIRE(d.prop_model.has_value());
  json j = model_to_json(d.prop_model->model, s);
  for (const auto& e : j["edges"]) {
    REQUIRE(e.size() == 2);
    CHECK(e[0] != e[1]);  // no reflexive edges serialized
  }
  // parse-back restores the reflexive-transitive closure
  auto err = check_artifact(json::parse(j.dump()));
  CHECK_FALSE(err.has_value());
}

TEST_CASE("predicate model json lists domains and relations") {
  Sequent s = parse_sequent("P(a0) |- forall x. P(x)");
  Decision d = decide(s, Mode::Positive);
  REQUIRE(d.pred_model.has_value());
  json j = model_to_json(d.pred_model->model, s);
  REQUIRE(j["worlds"].is_array());
  for (const auto& w : j["worlds"]) {
    CHECK(w.contains("domain"));
    CHECK(w.contains("relations"));
  }
  CHECK_FALSE(check_artifact(json::parse(j.dump())).has_value());
  CHECK(model_to_dot(d.pred_model->model).rfind("digraph", 0) == 0);
}

TEST_CASE("full stats json") {
  Sequent s = parse_sequent("forall x. P(x) |- exists y. P(y)");
  Decision d = decide(s, Mode::Full, 8);
  REQUIRE(d.full_stats.has_value());
  json j = stats_to_json(*d.full_stats);
  CHECK(j["full"].contains("stages"));
  CHECK(j["full"].contains("node_count"));
}
