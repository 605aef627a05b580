#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfe/corpus.hpp"
#include "hfe/report.hpp"

using namespace hfe;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

const CheckRecord* find_check(const VerificationReport& r, const std::string& id) {
  for (const CheckRecord& c : r.checks)
    if (c.id == id) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("an empty report prints only its header") {
  VerificationReport r;
  r.scenario = "nothing";
  r.seed = 4;
  CHECK(emit_text(r) == "scenario nothing seed 4 pipelines -\n");
  CHECK(r.exit_code() == 0);
  r.falsification = true;
  CHECK(r.exit_code() == 3);
}

TEST_CASE("all-pass report on the trivial scenario") {
  const VerificationReport r = run_scenario(builtin_scenario("trivial_r2"), {});
  CHECK(r.pass());
  CHECK(r.exit_code() == 0);
  CHECK(r.pipelines == pipeline_order());
  const auto ls = lines(emit_text(r));
  REQUIRE(ls.size() == r.checks.size() + 1);
  CHECK(ls[0].rfind("scenario trivial_r2 seed 1 pipelines validate,lift,", 0) == 0);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ends_with(ls[i], "  PASS"));
}

TEST_CASE("a failing report names the sample points") {
  Scenario s = builtin_scenario("circle_mobius");
  REQUIRE_FALSE(s.pairs.empty());
  const Overlap& ov = s.nerve.overlaps[0];
  const int p = ov.components[0].points[0];
  s.pairs[0].data.delta_samples[ov.b][s.nerve.chart_slot(ov.b, p)] *= 3.0;
  RunOptions opt;
  opt.pipelines = {"validate"};
  const VerificationReport r = run_scenario(s, opt);
  CHECK_FALSE(r.pass());
  CHECK(r.exit_code() == 1);
  bool named = false;
  for (const std::string& l : lines(emit_text(r))) {
    if (ends_with(l, "FAIL")) named = named || l.find("point " + std::to_string(p)) != std::string::npos;
  }
  CHECK(named);
}

TEST_CASE("expected counts are checked") {
  Scenario s = builtin_scenario("circle_mobius");
  s.expected.lift_classes = 3;
  RunOptions opt;
  opt.pipelines = {"lift"};
  const VerificationReport r = run_scenario(s, opt);
  const CheckRecord* c = find_check(r, "lift.classes");
  REQUIRE(c);
  CHECK_FALSE(c->pass);
  CHECK(r.constants.at("lift.classes") == 2);
}

TEST_CASE("tolerances follow CLI over scenario over defaults") {
  Scenario s = builtin_scenario("trivial_r2");
  RunOptions opt;
  opt.pipelines = {"validate"};
  CHECK(run_scenario(s, opt).tol.rel == 1e-9);
  s.tolerances["rel"] = 1e-7;
  CHECK(run_scenario(s, opt).tol.rel == 1e-7);
  opt.tolerances["rel"] = 1e-8;
  CHECK(run_scenario(s, opt).tol.rel == 1e-8);
  opt.tolerances["bogus"] = 1.0;
  CHECK_THROWS_AS(run_scenario(s, opt), ParseError);
}

TEST_CASE("pipeline requests are validated") {
  const Scenario sphere = builtin_scenario("sphere_octa");
  RunOptions opt;
  opt.pipelines = {"recipe"};
  CHECK_THROWS_AS(run_scenario(sphere, opt), ParseError);
  opt.pipelines = {"warp"};
  CHECK_THROWS_AS(run_scenario(sphere, opt), ParseError);
  opt.pipelines = {"lift", "validate"};
  CHECK(run_scenario(sphere, opt).pipelines == std::vector<std::string>{"validate", "lift"});
}

TEST_CASE("reports are deterministic and seed-addressed") {
  const Scenario s = builtin_scenario("abstract_k1_nonorientable");
  RunOptions opt;
  opt.seed = 12;
  const std::string a = emit_json(run_scenario(s, opt));
  const std::string b = emit_json(run_scenario(s, opt));
  CHECK(a == b);
  const json j = json::parse(a);
  CHECK(j["seed"] == 12);
  CHECK(j["scenario"] == "abstract_k1_nonorientable");
  CHECK_FALSE(j.contains("wall_seconds"));
  for (const json& c : j["checks"]) {
    CHECK(c.contains("id"));
    CHECK(c.contains("residual"));
    CHECK(c["pass"] == true);
  }
  opt.seed = 13;
  const VerificationReport other = run_scenario(s, opt);
  CHECK(other.pass());
}

TEST_CASE("the obstructed sphere passes with its expectation") {
  const VerificationReport r = run_scenario(builtin_scenario("sphere_octa"), {});
  CHECK(r.pass());
  const CheckRecord* c = find_check(r, "lift.obstruction");
  REQUIRE(c);
  CHECK(c->pass);
}
