#include "lvlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "lvlab/error.hpp"

namespace lvlab {

void validate_partition(const Partition& partition, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& block : partition) {
    if (block.empty()) throw InvalidArgument("partition: empty block");
    for (std::size_t i : block) {
      if (i >= n) {
        throw InvalidArgument("partition: species index " + std::to_string(i) + " out of range");
      }
      if (seen[i]++) {
        throw InvalidArgument("partition: species index " + std::to_string(i) +
                              " appears twice");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw InvalidArgument("partition: species index " + std::to_string(i) + " not covered");
    }
  }
}

std::vector<std::string> validate(const ModelParams& p) {
  if (!(p.m.grid() == p.grid)) throw InvalidArgument("m is sampled on a different grid");
  if (p.diffusions.empty()) throw InvalidArgument("diffusions: need at least one species");
  for (std::size_t i = 0; i < p.diffusions.size(); ++i) {
    if (!(p.diffusions[i] > 0.0) || !std::isfinite(p.diffusions[i])) {
      throw InvalidArgument("diffusions: entry " + std::to_string(i) + " is not positive");
    }
    if (i > 0 && p.diffusions[i] < p.diffusions[i - 1]) {
      throw InvalidArgument("diffusions: list must be sorted non-decreasing");
    }
  }
  if (p.partition) validate_partition(*p.partition, p.species());

  std::vector<std::string> warnings;
  if (integrate(p.m) < -1e-12) warnings.emplace_back("m has negative integral");
  if (!(p.m.max() - p.m.min() > 0.0)) warnings.emplace_back("m is constant");
  return warnings;
}

double dt_max(const ModelParams& p) {
  const double sup_abs = norm(p.m, NormKind::Sup);
  const double scale = sup_abs + 2.0 * std::max(p.m.max(), 0.0);
  if (scale <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.25 / scale;
}

SpeciesState zero_state(const Grid& g, std::size_t n_species, double time) {
  return SpeciesState{std::vector<Field>(n_species, Field(g, 0.0)), time};
}

SpeciesState constant_state(const Grid& g, const std::vector<double>& values, double time) {
  SpeciesState s{{}, time};
  for (double v : values) s.fields.emplace_back(g, v);
  return s;
}

namespace {

TridiagonalLU implicit_diffusion(const Grid& g, double d, double dt) {
  const NeumannLaplacian lap(g);
  const std::size_t n = g.size();
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = -dt * d * lap.sub()[j];
    b[j] = 1.0 - dt * d * lap.diag()[j];
    c[j] = -dt * d * lap.super()[j];
  }
  return TridiagonalLU(a, b, c);
}

}  // namespace

Simulation::Simulation(const ModelParams& p, const SpeciesState& initial, double dt)
    : grid_(p.grid), m_(p.m.values().begin(), p.m.values().end()), dt_(dt), time_(initial.time) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (initial.fields.size() != p.species()) {
    throw InvalidArgument("state has " + std::to_string(initial.fields.size()) +
                          " species, model has " + std::to_string(p.species()));
  }
  for (std::size_t i = 0; i < p.species(); ++i) {
    if (!(initial.fields[i].grid() == grid_)) throw InvalidArgument("state is on a different grid");
    // Species with equal rates share one factorisation.
    std::size_t k = 0;
    while (k < i && p.diffusions[k] != p.diffusions[i]) ++k;
    if (k < i) {
      solver_of_.push_back(solver_of_[k]);
    } else {
      solver_of_.push_back(lus_.size());
      lus_.push_back(implicit_diffusion(grid_, p.diffusions[i], dt));
    }
    u_.emplace_back(initial.fields[i].values().begin(), initial.fields[i].values().end());
  }
  total_.resize(grid_.size());
}

std::size_t Simulation::step() {
  const std::size_t n = grid_.size();
  std::fill(total_.begin(), total_.end(), 0.0);
  for (const auto& ui : u_) {
    for (std::size_t j = 0; j < n; ++j) total_[j] += ui[j];
  }
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < u_.size(); ++i) {
    auto& ui = u_[i];
    for (std::size_t j = 0; j < n; ++j) ui[j] += dt_ * ui[j] * (m_[j] - total_[j]);
    lus_[solver_of_[i]].solve(ui);
    for (double& v : ui) {
      if (v < 0.0) {
        v = 0.0;
        ++clamped;
      }
    }
  }
  time_ += dt_;
  clamped_ += clamped;
  return clamped;
}

SpeciesState Simulation::state() const {
  SpeciesState s{{}, time_};
  for (const auto& ui : u_) s.fields.emplace_back(grid_, ui);
  return s;
}

SpeciesState step_imex(const SpeciesState& state, const ModelParams& p, double dt) {
  Simulation sim(p, state, dt);
  sim.step();
  return sim.state();
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0.0)) throw InvalidArgument("horizon T must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio)) {
    throw InvalidArgument("horizon T must be a whole number of time steps");
  }
  return static_cast<std::size_t>(steps);
}

namespace {

void record(Trajectory& traj, const Simulation& sim, const Grid& g) {
  const auto& u = sim.densities();
  double mass = 0.0;
  std::vector<double> sups(u.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      mass += g.weight(j) * std::abs(u[i][j]);
      sups[i] = std::max(sups[i], std::abs(u[i][j]));
    }
  }
  traj.times.push_back(sim.time());
  traj.states.push_back(sim.state());
  traj.total_mass.push_back(mass);
  traj.sup_norms.push_back(std::move(sups));
}

}  // namespace

Trajectory integrate_to(const SpeciesState& state, const ModelParams& p, double dt, double T,
                        std::size_t stride) {
  const double limit = dt_max(p);
  if (dt > limit * (1.0 + 1e-12)) {
    throw InvalidArgument("dt = " + std::to_string(dt) + " exceeds dt_max = " +
                          std::to_string(limit));
  }
  const std::size_t steps = step_count(T, dt);
  if (stride == 0) stride = 1;
  Simulation sim(p, state, dt);
  Trajectory traj;
  record(traj, sim, p.grid);
  for (std::size_t k = 1; k <= steps; ++k) {
    sim.step();
    const bool keep = (k % stride == 0) || k == steps;
    if (keep) {
      for (const auto& ui : sim.densities()) {
        for (double v : ui) {
          if (!std::isfinite(v)) {
            throw BlowUp("non-finite density at t = " + std::to_string(sim.time()), sim.time());
          }
        }
      }
      record(traj, sim, p.grid);
    }
  }
  traj.clamped_nodes = sim.clamped_nodes();
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const std::size_t n = traj.sup_norms.empty() ? 0 : traj.sup_norms.front().size();
  out << "time";
  for (std::size_t i = 0; i < n; ++i) out << ",sup_u" << (i + 1);
  out << ",total_l1_mass\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    put(traj.times[s]);
    for (double v : traj.sup_norms[s]) {
      out << ',';
      put(v);
    }
    out << ',';
    put(traj.total_mass[s]);
    out << '\n';
  }
}

Field solve_theta(double d, const Field& m) {
  if (!(d > 0.0)) throw InvalidArgument("solve_theta: d must be positive");
  const Grid& g = m.grid();
  const std::size_t n = g.size();
  ModelParams single{g, m, {d}, std::nullopt};

  double dt = std::min(dt_max(single), 0.05);
  const std::size_t per_unit = static_cast<std::size_t>(std::ceil(1.0 / dt));
  dt = 1.0 / static_cast<double>(per_unit);
  const double start = 0.5 * std::max(m.max(), 1.0);
  Simulation sim(single, constant_state(g, {start}), dt);

  constexpr double kPlateau = 1e-10;
  constexpr double kMaxMarch = 5000.0;
  std::vector<double> prev = sim.densities()[0];
  while (sim.time() < kMaxMarch) {
    for (std::size_t k = 0; k < per_unit; ++k) sim.step();
    const auto& u = sim.densities()[0];
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change = std::max(change, std::abs(u[j] - prev[j]));
    prev = u;
    if (change < kPlateau) break;
  }
  std::vector<double> theta = sim.densities()[0];
  if (*std::max_element(theta.begin(), theta.end()) < 1e-8) {
    throw DegenerateSteadyState("single-species dynamics decay to zero; no positive steady state");
  }

  // Newton on F(theta) = d Delta theta + theta (m - theta).
  const NeumannLaplacian lap(g);
  std::vector<double> F(n), a(n), b(n), c(n);
  auto residual = [&] {
    lap.apply(theta, F);
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      F[j] = d * F[j] + theta[j] * (m[j] - theta[j]);
      r = std::max(r, std::abs(F[j]));
    }
    return r;
  };
  double r = residual();
  constexpr double kResidualTol = 1e-12;
  constexpr std::size_t kMaxNewton = 50;
  std::size_t it = 0;
  while (r >= kResidualTol) {
    if (++it > kMaxNewton) throw SolverFailure("Newton iteration for theta did not converge", r);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = d * lap.sub()[j];
      b[j] = d * lap.diag()[j] + m[j] - 2.0 * theta[j];
      c[j] = d * lap.super()[j];
    }
    std::vector<double> delta(F);
    for (double& v : delta) v = -v;
    TridiagonalLU(a, b, c).solve(delta);
    double step = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      theta[j] += delta[j];
      step = std::max(step, std::abs(delta[j]));
      scale = std::max(scale, std::abs(theta[j]));
    }
    const double r_next = residual();
    if (!std::isfinite(r_next)) throw SolverFailure("Newton iteration for theta diverged", r);
    r = r_next;
    // On fine grids d*Delta amplifies rounding past 1e-12; stop at the
    // update-size floor instead.
    if (step <= 1e-14 * std::max(1.0, scale)) break;
  }
  const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
  if (*hi < 1e-8) throw DegenerateSteadyState("steady state converged to zero");
  if (*lo <= 0.0) throw DegenerateSteadyState("steady state is not strictly positive");
  return Field(g, std::move(theta));
}

SpeciesState equilibrium(std::size_t i, const ModelParams& p) {
  if (i > p.species()) {
    throw InvalidArgument("equilibrium index " + std::to_string(i) + " out of range 0.." +
                          std::to_string(p.species()));
  }
  SpeciesState s = zero_state(p.grid, p.species());
  if (i > 0) s.fields[i - 1] = solve_theta(p.diffusions[i - 1], p.m);
  return s;
}

SpeciesState aggregate(const SpeciesState& state, const Partition& partition) {
  validate_partition(partition, state.fields.size());
  SpeciesState out{{}, state.time};
  for (const auto& block : partition) {
    const Grid& g = state.fields[block.front()].grid();
    std::vector<double> sum(g.size(), 0.0);
    for (std::size_t i : block) {
      const auto v = state.fields[i].values();
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += v[j];
    }
    out.fields.emplace_back(g, std::move(sum));
  }
  return out;
}

double sup_distance(const SpeciesState& a, const SpeciesState& b) {
  if (a.fields.size() != b.fields.size()) throw InvalidArgument("states differ in species count");
  double s = 0.0;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    s = std::max(s, norm(a.fields[i] - b.fields[i], NormKind::Sup));
  }
  return s;
}

}  // namespace lvlab
