#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfe/scenario.hpp"

namespace hfe {

/// Pipelines in dependency order.
const std::vector<std::string>& pipeline_order();

struct CheckRecord {
  std::string id;
  std::string anchor;  // the identity being checked
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::vector<Location> failures;
};

struct VerificationReport {
  std::string scenario;
  std::uint64_t seed = 0;
  Tolerances tol;
  std::vector<std::string> pipelines;
  std::vector<CheckRecord> checks;
  std::map<std::string, nlohmann::json> constants;  // chosen signs, counts, notes
  bool falsification = false;
  double wall_seconds = 0.0;  // not serialized

  bool pass() const;
  /// 0 when every check passes, 3 on a falsification event, 1 otherwise.
  int exit_code() const;
};

struct RunOptions {
  std::vector<std::string> pipelines;  // empty: the scenario's list, else all applicable
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 1;
};

/// Runs the requested pipelines in dependency order. Throws ParseError when
/// an explicitly requested pipeline needs data the scenario does not have.
VerificationReport run_scenario(const Scenario& s, const RunOptions& opt);

/// Keys sorted, residuals with 12 significant digits; no wall time.
std::string emit_json(const VerificationReport& r);
/// A header line, then one line per check ending in PASS or FAIL.
std::string emit_text(const VerificationReport& r);

}  // namespace hfe
