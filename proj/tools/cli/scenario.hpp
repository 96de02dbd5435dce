#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvlab/dynamics.hpp"
#include "lvlab/expr.hpp"

namespace lvlab::cli {

using Json = nlohmann::ordered_json;

/// Config problem; `path()` is the offending field, e.g. "diffusions" or "initial[1]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline constexpr const char* kDefaultM = "1 + 0.5*cos(3.141592653589793*x)";

struct Scenario {
  std::string experiment = "exclusion";
  double length = 1.0;
  std::size_t nodes = 401;
  std::string m = kDefaultM;
  std::vector<double> diffusions{0.2, 0.4};
  std::optional<Partition> partition;
  std::vector<std::string> initial;  // one expression per species; empty = 0.3 each
  double dt = 1e-3;
  double T = 400.0;
  std::size_t stride = 0;  // 0 = one sample per time unit
  std::uint64_t seed = 42;
  std::size_t workers = 0;  // 0 = available parallelism
  std::string output = "lvlab_out";
  Json options = Json::object();
};

/// Defaults overlaid with `config`. Unknown top-level keys are rejected.
Scenario scenario_from_json(const Json& config);
Json scenario_to_json(const Scenario& s);

/// Applies "key=value" with dotted keys ("grid.nodes=201", "options.tol=1e-2").
/// Values are read as JSON when possible, as a number list when
/// comma-separated, and as a string otherwise.
void apply_override(Json& config, const std::string& assignment);

/// Model built from a validated scenario.
struct ResolvedScenario {
  Scenario scenario;
  Grid grid;
  Field m;
  ModelParams params;
  SpeciesState initial;
  std::vector<std::string> warnings;
};

/// Parses every expression and checks sortedness, partition and dt <= dt_max.
/// Throws ConfigError naming the failing field.
ResolvedScenario resolve(const Scenario& s);

}  // namespace lvlab::cli
