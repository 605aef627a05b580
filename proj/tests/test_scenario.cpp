#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "hfe/corpus.hpp"
#include "hfe/report.hpp"
#include "hfe/scenario.hpp"

using namespace hfe;
using nlohmann::json;

namespace {

/// Two charts on eight circle points; sign -1 on the second overlap component.
json hand_circle() {
  return json::parse(R"({
    "name": "hand_circle",
    "n": 1,
    "nerve": {
      "points": [[0], [1], [2], [3], [4], [5], [6], [7]],
      "charts": [
        {"id": "a", "points": [7, 0, 1, 2, 3], "edges": [[7, 0], [0, 1], [1, 2], [2, 3]]},
        {"id": "b", "points": [3, 4, 5, 6, 7], "edges": [[3, 4], [4, 5], [5, 6], [6, 7]]}
      ],
      "overlaps": [{"pair": ["a", "b"], "components": [{"points": [3]}, {"points": [7]}]}]
    },
    "cocycle": {"group": "Gl", "n": 1, "transitions": [
      {"pair": ["a", "b"], "component": 0, "generator": {"name": "sign", "params": {"value": 1}}},
      {"pair": ["a", "b"], "component": 1, "generator": {"name": "sign", "params": {"value": -1}}}
    ]},
    "pairs": [{
      "name": "mobius",
      "k": 0,
      "pair_cocycle": {"group": "Glkd", "n": 1, "k": 0, "transitions": [
        {"pair": [0, 1], "component": 0, "generator": {"name": "identity"}},
        {"pair": [0, 1], "component": 1, "generator": {"name": "constant", "params": {"g1": [[-1]], "g2": [[-1]]}}}
      ]},
      "delta_samples": [
        {"chart": 0, "generator": {"name": "constant", "params": {"value": 1}}},
        {"chart": "b", "generator": {"name": "constant", "params": {"value": [1, 0]}}}
      ]
    }],
    "expected": {"lift_classes": 2}
  })");
}

std::string parse_error_where(const json& j) {
  try {
    scenario_from_json(j);
  } catch (const ParseError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("reading a handwritten scenario") {
  const Scenario s = scenario_from_json(hand_circle());
  CHECK(s.name == "hand_circle");
  CHECK(s.nerve.chart_count() == 2);
  CHECK(s.nerve.component_count() == 2);
  REQUIRE(s.cocycle);
  CHECK(s.cocycle->values[0][1][0](0, 0) == cplx(-1.0));
  REQUIRE(s.pairs.size() == 1);
  CHECK(s.pairs[0].data.delta_samples[1][4] == cplx(1.0));
  CHECK(s.expected.lift_classes == 2);
}

TEST_CASE("phase generators evaluate on point coordinates") {
  json j = hand_circle();
  j["cocycle"]["transitions"][1]["generator"] = {{"name", "phase"}, {"params", {{"winding", 0.5}, {"offset", 0.25}}}};
  const Scenario s = scenario_from_json(j);
  // Point 7: exp(2 pi i (0.5 * 7 + 0.25)).
  const cplx expected = std::exp(2.0 * 3.141592653589793 * cplx(0.0, 1.0) * 3.75);
  CHECK(std::abs(s.cocycle->values[0][1][0](0, 0) - expected) < 1e-12);
}

TEST_CASE("parse errors carry a location") {
  CHECK_THROWS_AS(scenario_from_text("{\"name\": "), ParseError);
  try {
    scenario_from_text("{\"name\": \"x\",\n \"n\": }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where().find("byte") != std::string::npos);
  }

  json bad_chart = hand_circle();
  bad_chart["cocycle"]["transitions"][0]["pair"] = json::array({0, 5});
  CHECK(parse_error_where(bad_chart) == "/cocycle/transitions/0/pair");

  json bad_gen = hand_circle();
  bad_gen["cocycle"]["transitions"][1]["generator"]["name"] = "spiral";
  CHECK(parse_error_where(bad_gen) == "/cocycle/transitions/1/generator/params");

  json no_nerve = hand_circle();
  no_nerve.erase("nerve");
  // A missing key is reported at its parent, here the document root.
  CHECK(parse_error_where(no_nerve).empty());
  try {
    scenario_from_json(no_nerve);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("nerve") != std::string::npos);
  }

  json bad_point = hand_circle();
  bad_point["nerve"]["charts"][0]["points"][0] = 99;
  CHECK(parse_error_where(bad_point).rfind("/nerve", 0) == 0);

  json bad_table = hand_circle();
  bad_table["pairs"][0]["delta_samples"][0]["generator"] = {{"name", "table"}, {"params", {{"values", {1, 2}}}}};
  CHECK(parse_error_where(bad_table) == "/pairs/0/delta_samples/0/generator/params/values");

  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST_CASE("built-in scenarios survive a JSON round trip") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const Scenario s = builtin_scenario(name);
    const json once = scenario_to_json(s);
    const Scenario back = scenario_from_json(once);
    CHECK(scenario_to_json(back) == once);
    RunOptions opt;
    opt.pipelines = {"validate"};
    CHECK(emit_json(run_scenario(s, opt)) == emit_json(run_scenario(back, opt)));
  }
  CHECK_THROWS_AS(builtin_scenario("klein_bottle"), DomainError);
}

TEST_CASE("schema lists the top-level keys") {
  const json& sc = scenario_schema();
  CHECK(sc["type"] == "object");
  for (const char* key : {"nerve", "cocycle", "pairs", "mp_cocycle", "sections", "pipelines", "tolerances", "expected"}) {
    CHECK(sc["properties"].contains(key));
  }
  CHECK(sc["required"].size() >= 1);
}
