#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hfe/cech.hpp"
#include "hfe/compatibility.hpp"
#include "hfe/metaplectic_induction.hpp"

namespace hfe {

/// Scenario input that cannot be read: malformed JSON, schema violations,
/// unknown generators. `where()` is a JSON pointer or a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// One pair of polarizations over the nerve.
struct PairCase {
  std::string name;
  int k = 0;
  PolarizationPairData data;
  std::optional<Cocycle<MlElement>> ml_lift;  // lift of the first cocycle; computed when absent
  bool self_compat = false;                   // run the diagonal construction
};

struct SectionFamilies {
  FrameSectionData first;
  FrameSectionData second;
};

struct Expectations {
  std::optional<int> lift_classes;
  std::optional<bool> obstructed;
};

struct Scenario {
  std::string name;
  std::string description;
  int n = 1;
  Nerve nerve;
  std::optional<Cocycle<CMat>> cocycle;  // Gl cocycle for the lift pipeline
  std::vector<PairCase> pairs;
  std::optional<MetaplecticBundleData> mp;
  std::optional<SectionFamilies> sections;
  std::vector<std::string> pipelines;     // default pipeline list
  std::map<std::string, double> tolerances;
  Expectations expected;
};

/// Reads a scenario; every generator is evaluated on the sample points.
Scenario scenario_from_json(const nlohmann::json& j);
/// Parses text, converting nlohmann parse errors to ParseError with the
/// byte offset.
Scenario scenario_from_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Writes every sampled value as a table generator, so that reading the
/// output reproduces the scenario bit for bit.
nlohmann::json scenario_to_json(const Scenario& s);

/// JSON schema of the scenario format.
const nlohmann::json& scenario_schema();

}  // namespace hfe
