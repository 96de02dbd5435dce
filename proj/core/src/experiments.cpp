#include "lvlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "lvlab/bundle.hpp"
#include "lvlab/error.hpp"
#include "lvlab/spectrum.hpp"

namespace lvlab {

const char* to_string(Verdict v) noexcept {
  return v == Verdict::Excluded ? "excluded" : "undecided";
}

namespace {

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

}  // namespace

ExclusionReport exclusion_experiment(const ModelParams& p, const SpeciesState& u0, double T,
                                     double dt, const ExclusionOptions& opts) {
  validate(p);
  const std::size_t N = p.species();
  for (std::size_t i = 1; i < N; ++i) {
    if (!(p.diffusions[i] > p.diffusions[i - 1])) {
      throw InvalidArgument("exclusion_experiment: diffusions must be strictly increasing");
    }
  }
  if (u0.fields.size() != N) throw InvalidArgument("exclusion_experiment: species count mismatch");
  for (const Field& f : u0.fields) {
    if (!(f.min() > 0.0)) throw InvalidArgument("exclusion_experiment: u0 must be strictly positive");
  }
  if (dt > dt_max(p) * (1.0 + 1e-12)) throw InvalidArgument("exclusion_experiment: dt > dt_max");
  const std::size_t steps = step_count(T, dt);
  const std::size_t stride =
      opts.stride > 0 ? opts.stride : std::max<std::size_t>(1, std::llround(1.0 / dt));

  const Grid& g = p.grid;
  const std::size_t n = g.size();
  const Field theta1 = solve_theta(p.diffusions[0], p.m);

  ExclusionReport r{p};
  r.T = T;
  r.dt = dt;
  r.tol = opts.tol;
  r.theta1_sup = theta1.max();
  r.mass_bound = 2.0 * g.length() * p.m.max();
  r.log_ratios.assign(N > 0 ? N - 1 : 0, {});
  std::vector<double> aggregate_dev;

  Simulation sim(p, u0, dt);
  auto sample = [&] {
    const auto& u = sim.densities();
    double mass = 0.0, dev = 0.0;
    std::vector<double> sups(N, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(u[i][j])) {
          throw BlowUp("non-finite density at t = " + std::to_string(sim.time()), sim.time());
        }
        total += u[i][j];
        mass += g.weight(j) * u[i][j];
        sups[i] = std::max(sups[i], u[i][j]);
      }
      dev = std::max(dev, std::abs(total - theta1[j]));
    }
    for (std::size_t i = 1; i < N; ++i) {
      double ratio = 0.0;
      for (std::size_t j = 0; j < n; ++j) ratio = std::max(ratio, u[i][j] / u[0][j]);
      r.log_ratios[i - 1].push_back(std::log(ratio));
    }
    r.times.push_back(sim.time());
    r.total_mass.push_back(mass);
    r.sup_norms.push_back(std::move(sups));
    aggregate_dev.push_back(dev);
  };

  sample();
  for (std::size_t k = 1; k <= steps; ++k) {
    sim.step();
    if (k % stride == 0 || k == steps) sample();
  }
  r.clamped_nodes = sim.clamped_nodes();

  const double t_start = u0.time;
  const std::size_t samples = r.times.size();
  std::size_t half = 0, quarter = 0;
  while (half < samples && r.times[half] < t_start + 0.5 * T) ++half;
  while (quarter < samples && r.times[quarter] < t_start + 0.75 * T) ++quarter;

  for (std::size_t k = half; k < samples; ++k) {
    r.late_mass_max = std::max(r.late_mass_max, r.total_mass[k]);
  }
  for (std::size_t k = quarter; k < samples; ++k) {
    r.aggregate_limsup = std::max(r.aggregate_limsup, aggregate_dev[k]);
  }
  r.mass_bound_ok = r.late_mass_max < r.mass_bound;

  bool all_negative = true;
  const std::span<const double> tail_t(r.times.data() + half, samples - half);
  for (const auto& series : r.log_ratios) {
    const double s = fit_slope(tail_t, std::span<const double>(series.data() + half, samples - half));
    r.slopes.push_back(s);
    all_negative = all_negative && s < 0.0;
  }

  SpeciesState e1 = zero_state(g, N);
  e1.fields[0] = theta1;
  r.final_distance = sup_distance(sim.state(), e1);
  r.verdict = (r.final_distance < opts.tol && all_negative) ? Verdict::Excluded : Verdict::Undecided;
  return r;
}

SlopeRate measured_slope_rate(const ModelParams& p, double dt) {
  const Field theta1 = solve_theta(p.diffusions[0], p.m);
  const CoefficientPath path = CoefficientPath::constant(p.m - theta1);
  SlopeRate out;
  double inf = std::numeric_limits<double>::infinity();
  for (double d : p.diffusions) {
    const double v = bundle_d_derivative(d, path, 0.0, 1.0, -1.0, dt).min();
    out.inf_derivative.push_back(v);
    inf = std::min(inf, v);
  }
  out.rhat = 0.5 * inf;
  return out;
}

std::vector<bool> slope_bound_holds(const ExclusionReport& r, double rhat) {
  std::vector<bool> ok;
  const auto& d = r.params.diffusions;
  for (std::size_t i = 1; i < d.size(); ++i) {
    ok.push_back(r.slopes[i - 1] <= -(d[i] - d[0]) * rhat);
  }
  return ok;
}

double aggregated_gap(const Field& m, std::span<const double> rates_a,
                      std::span<const double> rates_b, const Partition& partition,
                      const SpeciesState& u0, double T, double dt) {
  const std::size_t N = u0.fields.size();
  if (rates_a.size() != N || rates_b.size() != N) {
    throw InvalidArgument("aggregated_gap: rate lists must match the species count");
  }
  validate_partition(partition, N);
  const Grid& g = m.grid();
  ModelParams pa{g, m, {rates_a.begin(), rates_a.end()}, partition};
  ModelParams pb{g, m, {rates_b.begin(), rates_b.end()}, partition};
  const std::size_t steps = step_count(T, dt);
  Simulation a(pa, u0, dt), b(pb, u0, dt);
  double gap = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    a.step();
    b.step();
    const auto& ua = a.densities();
    const auto& ub = b.densities();
    for (const auto& block : partition) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        double diff = 0.0;
        for (std::size_t i : block) diff += ua[i][j] - ub[i][j];
        if (!std::isfinite(diff)) throw BlowUp("non-finite aggregated gap", a.time());
        gap = std::max(gap, std::abs(diff));
      }
    }
  }
  return gap;
}

ClosenessReport closeness_experiment(const Field& m, std::span<const double> hat_ds,
                                     std::span<const double> ds, const Partition& partition,
                                     const SpeciesState& u0, double T, double dt) {
  const std::size_t N = ds.size();
  if (partition.size() != hat_ds.size()) {
    throw InvalidArgument("closeness: partition has " + std::to_string(partition.size()) +
                          " blocks but " + std::to_string(hat_ds.size()) + " block rates given");
  }
  validate_partition(partition, N);
  std::vector<double> blockwise(N), halved(N);
  ClosenessReport r;
  r.T = T;
  for (std::size_t k = 0; k < partition.size(); ++k) {
    for (std::size_t i : partition[k]) {
      blockwise[i] = hat_ds[k];
      halved[i] = hat_ds[k] + 0.5 * (ds[i] - hat_ds[k]);
      r.epsilon = std::max(r.epsilon, std::abs(ds[i] - hat_ds[k]));
    }
  }
  r.gap = aggregated_gap(m, blockwise, ds, partition, u0, T, dt);
  r.gap_half = aggregated_gap(m, blockwise, halved, partition, u0, T, dt);
  r.ratio = r.gap > 0.0 ? r.gap_half / r.gap : 0.0;
  return r;
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("hausdorff_distance: empty set");
  auto directed = [](std::span<const double> from, std::span<const double> to) {
    double worst = 0.0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<std::vector<double>> invasion_matrix(const ModelParams& p) {
  validate(p);
  const std::size_t N = p.species();
  std::vector<Field> residents;
  for (double d : p.diffusions) residents.push_back(p.m - solve_theta(d, p.m));
  std::vector<std::vector<double>> out(N, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      out[i][j] = principal_eigenpair(p.diffusions[i], residents[j]).lambda;
    }
  }
  return out;
}

MorseReport dockery_morse_check(const ModelParams& p, double dt, double T, double tol) {
  if (p.species() != 2) throw InvalidArgument("dockery_morse_check needs exactly two species");
  validate(p);
  const Grid& g = p.grid;
  const SpeciesState e1 = equilibrium(1, p);
  const SpeciesState e2 = equilibrium(2, p);
  const SpeciesState e0 = equilibrium(0, p);

  SpeciesState near_e2 = e2;
  near_e2.fields[0] = Field(g, 1e-3);

  struct Case {
    const char* name;
    SpeciesState start;
    std::size_t target;
    const SpeciesState* limit;
  };
  const std::vector<Case> cases{
      {"interior", constant_state(g, {0.3, 0.3}), 1, &e1},
      {"face", constant_state(g, {0.0, 0.3}), 2, &e2},
      {"zero", constant_state(g, {0.0, 0.0}), 0, &e0},
      {"near_E2", near_e2, 1, &e1},
  };
  const std::size_t steps = step_count(T, dt);
  MorseReport report;
  report.tol = tol;
  report.passed = true;
  for (const Case& c : cases) {
    Simulation sim(p, c.start, dt);
    for (std::size_t k = 0; k < steps; ++k) sim.step();
    MorseLeg leg{c.name, c.target, sup_distance(sim.state(), *c.limit), false};
    leg.passed = leg.distance < tol;
    report.passed = report.passed && leg.passed;
    report.legs.push_back(std::move(leg));
  }
  return report;
}

std::vector<std::vector<double>> sample_hausdorff_sets(std::span<const double> centers,
                                                       double radius, std::size_t count,
                                                       std::uint64_t seed,
                                                       std::span<const std::size_t> sizes) {
  if (centers.empty()) throw InvalidArgument("sweep: need at least one center");
  if (!(radius > 0.0)) throw InvalidArgument("sweep: radius must be positive");
  if (sizes.empty()) throw InvalidArgument("sweep: need at least one set size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-radius, radius);
  std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
  std::vector<std::vector<double>> sets;
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t size = sizes[s % sizes.size()];
    if (size < centers.size()) {
      throw InvalidArgument("sweep: set size smaller than the number of centers");
    }
    for (;;) {
      std::vector<double> set;
      for (std::size_t k = 0; k < size; ++k) {
        const double c = k < centers.size() ? centers[k] : centers[pick(rng)];
        set.push_back(c + offset(rng));
      }
      std::sort(set.begin(), set.end());
      const bool distinct = std::adjacent_find(set.begin(), set.end(), [](double a, double b) {
                              return b - a < 1e-9;
                            }) == set.end();
      if (distinct && set.front() > 0.0 && hausdorff_distance(set, centers) < radius) {
        sets.push_back(std::move(set));
        break;
      }
    }
  }
  return sets;
}

std::vector<SweepEntry> run_sweep(const Grid& g, const Field& m,
                                  const std::vector<std::vector<double>>& sets,
                                  std::span<const double> centers, double u0, double T, double dt,
                                  std::size_t workers, const ExclusionOptions& opts) {
  std::vector<SweepEntry> out(sets.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    out[k].diffusions = sets[k];
    out[k].hausdorff = hausdorff_distance(sets[k], centers);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < sets.size(); k = next++) {
      try {
        ModelParams p{g, m, sets[k], std::nullopt};
        const SpeciesState start =
            constant_state(g, std::vector<double>(sets[k].size(), u0));
        out[k].report = exclusion_experiment(p, start, T, dt, opts);
      } catch (const std::exception& e) {
        out[k].error = e.what();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(sets.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace lvlab
