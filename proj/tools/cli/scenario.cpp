#include "scenario.hpp"

#include <set>
#include <sstream>

#include "lvlab/error.hpp"

namespace lvlab::cli {

namespace {

template <typename T>
T read(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path, "has the wrong type");
  }
}

}  // namespace

Scenario scenario_from_json(const Json& config) {
  if (!config.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::set<std::string> known{"experiment", "grid",  "m",      "diffusions",
                                           "partition",  "initial", "dt",   "T",
                                           "stride",     "seed",  "workers", "output",
                                           "options"};
  for (const auto& [key, value] : config.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown field");
  }
  Scenario s;
  if (config.contains("experiment")) s.experiment = read<std::string>(config["experiment"], "experiment");
  if (config.contains("grid")) {
    const Json& g = config["grid"];
    if (!g.is_object()) throw ConfigError("grid", "must be an object");
    if (g.contains("length")) s.length = read<double>(g["length"], "grid.length");
    if (g.contains("nodes")) s.nodes = read<std::size_t>(g["nodes"], "grid.nodes");
  }
  if (config.contains("m")) s.m = read<std::string>(config["m"], "m");
  if (config.contains("diffusions")) {
    s.diffusions = read<std::vector<double>>(config["diffusions"], "diffusions");
  }
  if (config.contains("partition") && !config["partition"].is_null()) {
    s.partition = read<Partition>(config["partition"], "partition");
  }
  if (config.contains("initial")) {
    const Json& init = config["initial"];
    if (!init.is_array()) throw ConfigError("initial", "must be an array of expressions");
    for (std::size_t i = 0; i < init.size(); ++i) {
      const std::string path = "initial[" + std::to_string(i) + "]";
      if (init[i].is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << init[i].get<double>();
        s.initial.push_back(os.str());
      } else {
        s.initial.push_back(read<std::string>(init[i], path));
      }
    }
  }
  if (config.contains("dt")) s.dt = read<double>(config["dt"], "dt");
  if (config.contains("T")) s.T = read<double>(config["T"], "T");
  if (config.contains("stride")) s.stride = read<std::size_t>(config["stride"], "stride");
  if (config.contains("seed")) s.seed = read<std::uint64_t>(config["seed"], "seed");
  if (config.contains("workers")) s.workers = read<std::size_t>(config["workers"], "workers");
  if (config.contains("output")) s.output = read<std::string>(config["output"], "output");
  if (config.contains("options")) {
    if (!config["options"].is_object()) throw ConfigError("options", "must be an object");
    s.options = config["options"];
  }
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["experiment"] = s.experiment;
  j["grid"] = {{"length", s.length}, {"nodes", s.nodes}};
  j["m"] = s.m;
  j["diffusions"] = s.diffusions;
  j["partition"] = s.partition ? Json(*s.partition) : Json(nullptr);
  j["initial"] = s.initial;
  j["dt"] = s.dt;
  j["T"] = s.T;
  j["stride"] = s.stride;
  j["seed"] = s.seed;
  j["workers"] = s.workers;
  j["output"] = s.output;
  j["options"] = s.options;
  return j;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must have the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::exception&) {
    if (text.find(',') != std::string::npos) {
      value = Json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          value.push_back(Json::parse(item));
        } catch (const nlohmann::json::exception&) {
          value = text;
          break;
        }
      }
    } else {
      value = text;
    }
  }

  Json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component in override");
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ResolvedScenario resolve(const Scenario& s) {
  std::optional<Grid> grid;
  try {
    grid.emplace(s.length, s.nodes);
  } catch (const InvalidArgument& e) {
    throw ConfigError("grid", e.what());
  }
  auto field_of = [&](const std::string& text, const std::string& path) {
    try {
      return sample(parse(text), *grid, 0.0);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  };
  Field m = field_of(s.m, "m");

  if (s.diffusions.empty()) throw ConfigError("diffusions", "need at least one rate");
  for (std::size_t i = 0; i < s.diffusions.size(); ++i) {
    if (!(s.diffusions[i] > 0.0)) {
      throw ConfigError("diffusions", "entry " + std::to_string(i) + " is not positive");
    }
    if (i > 0 && s.diffusions[i] < s.diffusions[i - 1]) {
      throw ConfigError("diffusions", "list must be sorted non-decreasing");
    }
  }
  ModelParams params{*grid, m, s.diffusions, s.partition};
  std::vector<std::string> warnings;
  try {
    warnings = validate(params);
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.partition ? "partition" : "diffusions", e.what());
  }

  SpeciesState initial;
  if (s.initial.empty()) {
    initial = constant_state(*grid, std::vector<double>(s.diffusions.size(), 0.3));
  } else {
    if (s.initial.size() != s.diffusions.size()) {
      throw ConfigError("initial", "need one expression per species (" +
                                       std::to_string(s.diffusions.size()) + ")");
    }
    for (std::size_t i = 0; i < s.initial.size(); ++i) {
      const std::string path = "initial[" + std::to_string(i) + "]";
      Field f = field_of(s.initial[i], path);
      if (f.min() < 0.0) throw ConfigError(path, "initial density must be non-negative");
      initial.fields.push_back(std::move(f));
    }
  }

  if (!(s.dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (s.dt > dt_max(params) * (1.0 + 1e-12)) {
    throw ConfigError("dt", "exceeds dt_max = " + std::to_string(dt_max(params)));
  }
  if (!(s.T > 0.0)) throw ConfigError("T", "must be positive");
  return ResolvedScenario{s, *grid, m, params, initial, warnings};
}

}  // namespace lvlab::cli
