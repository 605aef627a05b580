#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hfe/corpus.hpp"
#include "hfe/report.hpp"

namespace {

// Exit codes: 0 pass, 1 check failure, 2 parse error, 3 falsification.
constexpr int kParseError = 2;

hfe::Scenario resolve(const std::string& target) {
  if (std::filesystem::exists(target)) return hfe::load_scenario(target);
  const auto& names = hfe::builtin_names();
  if (std::find(names.begin(), names.end(), target) != names.end()) return hfe::builtin_scenario(target);
  throw hfe::ParseError(target, "no such file or built-in scenario");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int verify(const std::vector<std::string>& targets, const std::string& pipelines,
           const std::vector<std::string>& tolerances, std::uint64_t seed, const std::string& format, int jobs) {
  hfe::RunOptions opt;
  opt.seed = seed;
  opt.pipelines = split(pipelines, ',');
  for (const std::string& kv : tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "parse error: --tolerance " << kv << ": expected key=value\n";
      return kParseError;
    }
    try {
      opt.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "parse error: --tolerance " << kv << ": value is not a number\n";
      return kParseError;
    }
  }
  std::vector<hfe::Scenario> scenarios;
  try {
    for (const std::string& t : targets) scenarios.push_back(resolve(t));
  } catch (const hfe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseError;
  }
  std::vector<std::optional<hfe::VerificationReport>> reports(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        reports[i] = hfe::run_scenario(scenarios[i], opt);
      } catch (const hfe::ParseError& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "parse error: " << errors[i] << '\n';
      return kParseError;
    }
  }
  int code = 0;
  if (format == "json" && reports.size() > 1) std::cout << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const hfe::VerificationReport& r = *reports[i];
    if (format == "json") {
      std::string s = hfe::emit_json(r);
      if (reports.size() > 1) {
        s.pop_back();
        s += i + 1 < reports.size() ? ",\n" : "\n";
      }
      std::cout << s;
    } else {
      std::cout << hfe::emit_text(r);
      std::cerr << r.scenario << ": " << r.wall_seconds << " s\n";
    }
    const int c = r.exit_code();
    if (c == 3 || (c == 1 && code == 0)) code = c;
  }
  if (format == "json" && reports.size() > 1) std::cout << "]\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of half-form pairings for compatible polarizations"};
  app.require_subcommand(1);

  std::vector<std::string> targets;
  std::string pipelines;
  std::vector<std::string> tolerances;
  std::uint64_t seed = 1;
  std::string format = "text";
  int jobs = 1;
  auto* v = app.add_subcommand("verify", "Run verification pipelines on scenario files or built-in scenarios");
  v->add_option("scenarios", targets, "Scenario files or built-in names")->required();
  v->add_option("--pipeline", pipelines, "Comma-separated pipelines (default: the scenario's list)");
  v->add_option("--tolerance", tolerances, "Tolerance override key=value (rel, abs, singular, track)");
  v->add_option("--seed", seed, "Seed for randomized checks");
  v->add_option("--report", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  v->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");
  auto* schema = app.add_subcommand("schema", "Print the scenario JSON schema");

  std::string export_dir = "scenarios";
  std::vector<std::string> export_names;
  auto* exp = app.add_subcommand("export", "Write built-in scenarios as JSON files");
  exp->add_option("names", export_names, "Built-in names (default: all)");
  exp->add_option("-o,--output", export_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParseError;
  }

  try {
    if (*v) return verify(targets, pipelines, tolerances, seed, format, jobs);
    if (*list) {
      for (const std::string& name : hfe::builtin_names()) {
        std::cout << name << "  " << hfe::builtin_scenario(name).description << '\n';
      }
      return 0;
    }
    if (*schema) {
      std::cout << hfe::scenario_schema().dump(2) << '\n';
      return 0;
    }
    if (*exp) {
      if (export_names.empty()) export_names = hfe::builtin_names();
      std::filesystem::create_directories(export_dir);
      for (const std::string& name : export_names) {
        const auto path = std::filesystem::path(export_dir) / (name + ".json");
        std::ofstream out(path);
        out << hfe::scenario_to_json(hfe::builtin_scenario(name)).dump(1) << '\n';
        std::cout << path.string() << '\n';
      }
      return 0;
    }
  } catch (const hfe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
