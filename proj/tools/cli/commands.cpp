#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <thread>

#include "lvlab/bundle.hpp"
#include "lvlab/error.hpp"
#include "lvlab/experiments.hpp"
#include "lvlab/spectrum.hpp"

namespace lvlab::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Result of one experiment before it is wrapped in the report envelope.
struct Outcome {
  std::string verdict;
  bool decided = true;
  Json metrics = Json::object();
  std::vector<std::string> series{};
};

double opt_double(const Scenario& s, const char* key, double fallback) {
  if (!s.options.contains(key)) return fallback;
  try {
    return s.options[key].get<double>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("options.") + key, "must be a number");
  }
}

std::size_t opt_size(const Scenario& s, const char* key, std::size_t fallback) {
  if (!s.options.contains(key)) return fallback;
  try {
    return s.options[key].get<std::size_t>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("options.") + key, "must be a non-negative integer");
  }
}

std::vector<double> opt_list(const Scenario& s, const char* key, std::vector<double> fallback) {
  if (!s.options.contains(key)) return fallback;
  try {
    const Json& v = s.options[key];
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("options.") + key, "must be a number list");
  }
}

std::string opt_string(const Scenario& s, const char* key, const std::string& fallback) {
  if (!s.options.contains(key)) return fallback;
  try {
    return s.options[key].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("options.") + key, "must be a string");
  }
}

Field opt_field(const Scenario& s, const char* key, const Grid& g, const Field& fallback) {
  if (!s.options.contains(key)) return fallback;
  const std::string text = opt_string(s, key, "");
  try {
    return sample(parse(text), g, 0.0);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("options.") + key, e.what());
  }
}

Outcome run_steady(const ResolvedScenario& r, const fs::path& out) {
  const double d = opt_double(r.scenario, "d", r.scenario.diffusions.front());
  const Field theta = solve_theta(d, r.m);
  write_field_csv(out / "theta.csv", "theta", theta);
  Outcome o{"computed"};
  o.metrics["d"] = d;
  o.metrics["theta_sup"] = theta.max();
  o.metrics["theta_inf"] = theta.min();
  o.metrics["theta_integral"] = integrate(theta);
  o.metrics["mu1_of_m_minus_theta"] = principal_eigenpair(d, r.m - theta).lambda;
  o.series.push_back("theta.csv");
  return o;
}

Outcome run_eigen(const ResolvedScenario& r, const fs::path& out) {
  const double d = opt_double(r.scenario, "d", r.scenario.diffusions.front());
  const Field h = opt_field(r.scenario, "h", r.grid, r.m);
  const PrincipalPair pair = principal_eigenpair(d, h);
  write_field_csv(out / "psi.csv", "psi", pair.psi);
  Outcome o{"computed"};
  o.metrics["d"] = d;
  o.metrics["lambda"] = pair.lambda;
  o.metrics["residual"] = pair.residual;
  o.metrics["iterations"] = pair.iterations;
  o.metrics["identity_residual"] = eigen_identity_residual(d, h, pair);
  o.metrics["d_lambda_formula"] = d_lambda_formula(pair);
  o.metrics["d_lambda_fd"] = d_lambda_fd(d, h);
  o.series.push_back("psi.csv");
  return o;
}

Outcome run_bundle(const ResolvedScenario& r, const fs::path& out) {
  const Scenario& s = r.scenario;
  const double d = opt_double(s, "d", s.diffusions.front());
  const double t0 = opt_double(s, "t0", 0.0);
  const double t1 = opt_double(s, "t1", 10.0);
  const double spinup = opt_double(s, "spinup", -1.0);
  std::optional<CoefficientPath> path;
  if (s.options.contains("h")) {
    const std::string text = opt_string(s, "h", "");
    try {
      path = CoefficientPath::expression(parse(text), r.grid);
      path->at(t0);
    } catch (const std::exception& e) {
      throw ConfigError("options.h", e.what());
    }
  } else {
    path = CoefficientPath::constant(r.m - solve_theta(s.diffusions.front(), r.m));
  }
  BundleOptions bopts;
  bopts.record_stride = opt_size(s, "record_stride", 1);
  const BundleTrajectory b = compute_bundle(d, *path, t0, t1, spinup, s.dt, bopts);
  {
    std::ofstream f = open_out(out / "bundle.csv");
    write_bundle_csv(b, f);
  }
  const SeparationEstimate sep =
      separation_rate(d, *path, t0, t1, s.dt, opt_size(s, "trials", 3), s.seed, spinup);
  Outcome o{sep.gamma > 0.0 ? "separated" : "undecided"};
  o.decided = sep.gamma > 0.0;
  double hmin = b.H.front(), hmax = b.H.front();
  for (double v : b.H) {
    hmin = std::min(hmin, v);
    hmax = std::max(hmax, v);
  }
  o.metrics["d"] = d;
  o.metrics["spinup"] = b.spinup;
  o.metrics["H1_min"] = hmin;
  o.metrics["H1_max"] = hmax;
  o.metrics["harnack"] = b.harnack;
  o.metrics["normalization_error"] = b.normalization_error;
  o.metrics["gamma"] = sep.gamma;
  o.metrics["gamma_trials"] = sep.trial_rates;
  o.metrics["gamma_truncated"] = sep.truncated;
  if (s.options.value("derivative", false)) {
    const BundleDerivative dd = bundle_d_derivative(d, *path, t0, t1, -1.0, s.dt, spinup);
    o.metrics["dH1_dd_inf"] = dd.min();
  }
  o.series.push_back("bundle.csv");
  return o;
}

void write_exclusion_series(const ExclusionReport& rep, const fs::path& path) {
  std::ofstream f = open_out(path);
  const std::size_t N = rep.params.species();
  f << "time";
  for (std::size_t i = 0; i < N; ++i) f << ",sup_u" << i + 1;
  f << ",total_l1_mass";
  for (std::size_t i = 1; i < N; ++i) f << ",log_sup_ratio_" << i + 1;
  f << '\n';
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    f << num(rep.times[k]);
    for (double v : rep.sup_norms[k]) f << ',' << num(v);
    f << ',' << num(rep.total_mass[k]);
    for (const auto& series : rep.log_ratios) f << ',' << num(series[k]);
    f << '\n';
  }
}

Json exclusion_metrics(const ExclusionReport& rep) {
  Json m;
  m["T"] = rep.T;
  m["dt"] = rep.dt;
  m["tol"] = rep.tol;
  m["final_distance"] = rep.final_distance;
  m["ratio_slopes"] = rep.slopes;
  m["aggregate_limsup"] = rep.aggregate_limsup;
  m["theta1_sup"] = rep.theta1_sup;
  m["late_mass_max"] = rep.late_mass_max;
  m["mass_bound"] = rep.mass_bound;
  m["mass_bound_ok"] = rep.mass_bound_ok;
  m["clamped_nodes"] = rep.clamped_nodes;
  return m;
}

Outcome run_exclusion(const ResolvedScenario& r, const fs::path& out) {
  const Scenario& s = r.scenario;
  ExclusionOptions eo;
  eo.tol = opt_double(s, "tol", eo.tol);
  eo.stride = s.stride;
  const ExclusionReport rep = exclusion_experiment(r.params, r.initial, s.T, s.dt, eo);
  write_exclusion_series(rep, out / "exclusion_series.csv");
  Outcome o{to_string(rep.verdict)};
  o.decided = rep.verdict == Verdict::Excluded;
  o.metrics = exclusion_metrics(rep);
  if (s.options.value("slope_bound", false)) {
    const SlopeRate rate = measured_slope_rate(r.params, s.dt);
    o.metrics["rhat"] = rate.rhat;
    o.metrics["inf_dH1_dd"] = rate.inf_derivative;
    const auto holds = slope_bound_holds(rep, rate.rhat);
    o.metrics["slope_bound_holds"] = Json(std::vector<bool>(holds.begin(), holds.end()));
  }
  o.series.push_back("exclusion_series.csv");
  return o;
}

Outcome run_closeness(const ResolvedScenario& r, const fs::path&) {
  const Scenario& s = r.scenario;
  if (!s.partition) throw ConfigError("partition", "closeness needs a partition");
  const std::vector<double> hat = opt_list(s, "hat_diffusions", {});
  if (hat.size() != s.partition->size()) {
    throw ConfigError("options.hat_diffusions", "need one rate per partition block");
  }
  const ClosenessReport rep =
      closeness_experiment(r.m, hat, s.diffusions, *s.partition, r.initial, s.T, s.dt);
  Outcome o{"computed"};
  o.metrics["epsilon"] = rep.epsilon;
  o.metrics["T"] = rep.T;
  o.metrics["gap"] = rep.gap;
  o.metrics["gap_half"] = rep.gap_half;
  o.metrics["ratio"] = rep.ratio;
  return o;
}

Outcome run_invasion(const ResolvedScenario& r, const fs::path& out) {
  const auto mat = invasion_matrix(r.params);
  const std::size_t N = mat.size();
  bool ordered = true;
  {
    std::ofstream f = open_out(out / "invasion_matrix.csv");
    f << "i,j,d_i,d_j,mu1\n";
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        f << i + 1 << ',' << j + 1 << ',' << num(r.params.diffusions[i]) << ','
          << num(r.params.diffusions[j]) << ',' << num(mat[i][j]) << '\n';
        if (i < j && !(mat[i][j] < 0.0)) ordered = false;
        if (i > j && !(mat[i][j] > 0.0)) ordered = false;
      }
    }
  }
  Outcome o{ordered ? "ordered" : "undecided"};
  o.decided = ordered;
  o.metrics["matrix"] = mat;
  o.series.push_back("invasion_matrix.csv");
  return o;
}

Outcome run_morse(const ResolvedScenario& r, const fs::path&) {
  const Scenario& s = r.scenario;
  const MorseReport rep = dockery_morse_check(r.params, s.dt, s.T, opt_double(s, "tol", 1e-3));
  Outcome o{rep.passed ? "passed" : "undecided"};
  o.decided = rep.passed;
  Json legs = Json::array();
  for (const MorseLeg& leg : rep.legs) {
    legs.push_back({{"name", leg.name},
                    {"target", "E" + std::to_string(leg.target)},
                    {"distance", leg.distance},
                    {"passed", leg.passed}});
  }
  o.metrics["tol"] = rep.tol;
  o.metrics["legs"] = legs;
  return o;
}

std::size_t worker_count(const Scenario& s) {
  if (s.workers > 0) return s.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

Outcome run_sweep_cmd(const ResolvedScenario& r, const fs::path& out, std::ostream& log,
                      bool timestamp) {
  const Scenario& s = r.scenario;
  const std::vector<double> around = opt_list(s, "around", {0.2, 0.4});
  const double radius = opt_double(s, "radius", 0.02);
  const std::size_t count = opt_size(s, "count", 20);
  std::vector<std::size_t> sizes;
  for (double v : opt_list(s, "sizes", {3.0, 4.0})) sizes.push_back(static_cast<std::size_t>(v));
  const auto sets = sample_hausdorff_sets(around, radius, count, s.seed, sizes);
  ExclusionOptions eo;
  eo.tol = opt_double(s, "tol", eo.tol);
  eo.stride = s.stride;
  const double u0 = opt_double(s, "u0", 0.3);
  const auto entries = run_sweep(r.grid, r.m, sets, around, u0, s.T, s.dt, worker_count(s), eo);

  Outcome o{"excluded"};
  std::size_t excluded = 0;
  Json rows = Json::array();
  std::ofstream summary = open_out(out / "sweep_summary.csv");
  summary << "index,diffusions,hausdorff,verdict,final_distance,max_ratio_slope\n";
  log << "  #  hausdorff  verdict    final_dist  diffusions\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const SweepEntry& e = entries[k];
    std::string ds;
    for (double d : e.diffusions) ds += (ds.empty() ? "" : ";") + num(d);
    std::string verdict = "error";
    double dist = std::nan("");
    double worst_slope = std::nan("");
    if (e.report) {
      verdict = to_string(e.report->verdict);
      dist = e.report->final_distance;
      worst_slope = *std::max_element(e.report->slopes.begin(), e.report->slopes.end());
      if (e.report->verdict == Verdict::Excluded) ++excluded;
      const std::string name = "sweep_" + std::to_string(k) + "_report.json";
      Json sub;
      Scenario child = s;
      child.experiment = "exclusion";
      child.diffusions = e.diffusions;
      sub["scenario"] = scenario_to_json(child);
      sub["verdict"] = verdict;
      sub["metrics"] = exclusion_metrics(*e.report);
      sub["series_files"] = Json::array();
      sub["version"] = kVersion;
      if (timestamp) sub["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
      std::ofstream f = open_out(out / name);
      f << sub.dump(2) << '\n';
      o.series.push_back(name);
    }
    summary << k << ',' << ds << ',' << num(e.hausdorff) << ',' << verdict << ',' << num(dist)
            << ',' << num(worst_slope) << '\n';
    char line[200];
    std::snprintf(line, sizeof line, "%3zu  %9.5f  %-9s  %10.3e  ", k, e.hausdorff,
                  verdict.c_str(), dist);
    log << line << ds << '\n';
    rows.push_back({{"diffusions", e.diffusions},
                    {"hausdorff", e.hausdorff},
                    {"verdict", verdict},
                    {"error", e.error}});
  }
  o.series.insert(o.series.begin(), "sweep_summary.csv");
  o.decided = excluded == entries.size();
  o.verdict = o.decided ? "excluded" : "undecided";
  o.metrics["count"] = entries.size();
  o.metrics["excluded"] = excluded;
  o.metrics["sets"] = rows;
  return o;
}

}  // namespace

void write_field_csv(const fs::path& path, const std::string& column, const Field& f) {
  std::ofstream out = open_out(path);
  out << "x," << column << '\n';
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << num(f.grid().node(j)) << ',' << num(f[j]) << '\n';
  }
}

RunResult run_scenario(const Scenario& input, const RunOptions& opts, std::ostream& log) {
  Scenario s = input;
  if (opts.out_dir) s.output = *opts.out_dir;
  if (opts.seed) s.seed = *opts.seed;
  if (opts.workers) s.workers = *opts.workers;
  const ResolvedScenario r = resolve(s);
  for (const std::string& w : r.warnings) log << "warning: " << w << '\n';

  const fs::path out(s.output);
  fs::create_directories(out);

  Outcome o;
  if (s.experiment == "steady") {
    o = run_steady(r, out);
  } else if (s.experiment == "eigen") {
    o = run_eigen(r, out);
  } else if (s.experiment == "bundle") {
    o = run_bundle(r, out);
  } else if (s.experiment == "exclusion") {
    o = run_exclusion(r, out);
  } else if (s.experiment == "closeness") {
    o = run_closeness(r, out);
  } else if (s.experiment == "invasion") {
    o = run_invasion(r, out);
  } else if (s.experiment == "morse2") {
    o = run_morse(r, out);
  } else if (s.experiment == "sweep") {
    o = run_sweep_cmd(r, out, log, opts.timestamp);
  } else {
    throw ConfigError("experiment", "unknown experiment '" + s.experiment + "'");
  }

  RunResult result;
  result.verdict = o.verdict;
  result.exit_code = o.decided ? 0 : 2;
  result.report["scenario"] = scenario_to_json(s);
  result.report["verdict"] = o.verdict;
  result.report["metrics"] = o.metrics;
  result.report["series_files"] = o.series;
  result.report["version"] = kVersion;
  if (opts.timestamp) result.report["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
  result.report_path = out / (s.experiment + "_report.json");
  {
    std::ofstream f = open_out(result.report_path);
    f << result.report.dump(2) << '\n';
  }
  log << s.experiment << ": " << o.verdict << " (report " << result.report_path.string() << ")\n";
  return result;
}

int run(const std::string& config_path, const std::vector<std::string>& overrides,
        const RunOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    Json config = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("--config", "cannot open " + config_path);
      try {
        config = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
    }
    for (const std::string& o : overrides) apply_override(config, o);
    const Scenario s = scenario_from_json(config);
    return run_scenario(s, opts, log).exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << " (last residual " << e.residual() << ")\n";
  } catch (const BlowUp& e) {
    err << "blow-up: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace lvlab::cli
