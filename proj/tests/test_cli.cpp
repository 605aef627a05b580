#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct Result {
  int code;
  std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Result run(const std::string& args, bool with_stderr = true) {
  const std::string cmd = std::string(HFE_BINARY) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "hfe_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("verify on built-in scenarios") {
  const Result ok = run("verify trivial_r2 --report text", false);
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("scenario trivial_r2 seed 1", 0) == 0);

  const Result lift = run("verify circle_mobius --pipeline lift --report json", false);
  CHECK(lift.code == 0);
  const auto j = nlohmann::json::parse(lift.out);
  CHECK(j["constants"]["lift.classes"] == 2);
  CHECK(j["pipelines"] == nlohmann::json::array({"lift"}));

  const Result both = run("verify trivial_r2 sphere_octa --pipeline validate --report json --jobs 2", false);
  CHECK(both.code == 0);
  CHECK(nlohmann::json::parse(both.out).size() == 2);
}

TEST_CASE("list-scenarios and schema") {
  const Result list = run("list-scenarios");
  CHECK(list.code == 0);
  for (const char* name : {"trivial_r2", "circle_mobius", "torus_grid", "sphere_octa", "abstract_k1_nonorientable"}) {
    CHECK(list.out.find(name) != std::string::npos);
  }
  const Result schema = run("schema", false);
  CHECK(schema.code == 0);
  CHECK(nlohmann::json::parse(schema.out).contains("$schema"));
}

TEST_CASE("parse errors exit with code 2") {
  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << "{\"name\": \"x\", \"n\": ";
  const Result r = run("verify " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("byte") != std::string::npos);

  CHECK(run("verify no_such_scenario").code == 2);
  CHECK(run("verify trivial_r2 --pipeline warp").code == 2);
  CHECK(run("verify trivial_r2 --tolerance rel").code == 2);
  CHECK(run("verify sphere_octa --pipeline recipe").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("tight tolerances fail with code 1") {
  const Result r = run("verify abstract_k1_nonorientable --pipeline delta_D --tolerance rel=1e-30", false);
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("exported scenarios verify identically") {
  const auto dir = scratch() / "export";
  REQUIRE(run("export circle_mobius abstract_k1_nonorientable -o " + dir.string()).code == 0);
  for (const char* name : {"circle_mobius", "abstract_k1_nonorientable"}) {
    const Result a = run(std::string("verify ") + name + " --report json", false);
    const Result b = run("verify " + (dir / (std::string(name) + ".json")).string() + " --report json", false);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
