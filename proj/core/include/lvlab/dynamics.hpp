#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lvlab/grid.hpp"
#include "lvlab/tridiag.hpp"

namespace lvlab {

/// Index sets I_1..I_K (0-based species indices) forming a disjoint cover.
using Partition = std::vector<std::vector<std::size_t>>;

/// Competition model: u_i' = d_i Delta u_i + u_i (m - sum_j u_j), Neumann.
struct ModelParams {
  Grid grid;
  Field m;
  std::vector<double> diffusions;  // non-decreasing, all > 0
  std::optional<Partition> partition;

  std::size_t species() const noexcept { return diffusions.size(); }
};

/// Throws InvalidArgument on hard violations (unsorted or non-positive
/// diffusions, grid mismatch, bad partition). Soft violations (int m < 0,
/// constant m) are returned as warnings.
std::vector<std::string> validate(const ModelParams& p);

/// Throws InvalidArgument unless `partition` is a disjoint cover of 0..n-1.
void validate_partition(const Partition& partition, std::size_t n);

/// 0.25 / (sup|m| + 2 sup m): keeps the explicit logistic term monotone.
double dt_max(const ModelParams& p);

struct SpeciesState {
  std::vector<Field> fields;
  double time = 0.0;
};

SpeciesState zero_state(const Grid& g, std::size_t n_species, double time = 0.0);
SpeciesState constant_state(const Grid& g, const std::vector<double>& values, double time = 0.0);

/// IMEX Euler for the full system with cached factorisations of
/// (I - dt d_i Delta). Fields are held as raw vectors for speed.
class Simulation {
 public:
  Simulation(const ModelParams& p, const SpeciesState& initial, double dt);

  /// One step; returns the number of nodes clamped from negative to zero.
  std::size_t step();

  double time() const noexcept { return time_; }
  double dt() const noexcept { return dt_; }
  const std::vector<std::vector<double>>& densities() const noexcept { return u_; }
  SpeciesState state() const;
  std::size_t clamped_nodes() const noexcept { return clamped_; }

 private:
  Grid grid_;
  std::vector<double> m_;
  double dt_;
  double time_;
  std::vector<std::size_t> solver_of_;  // species -> index into lus_
  std::vector<TridiagonalLU> lus_;
  std::vector<std::vector<double>> u_;
  std::vector<double> total_;
  std::size_t clamped_ = 0;
};

/// One IMEX Euler step: (I - dt d_i Delta) u_i' = u_i + dt u_i (m - sum u), then
/// clamp negatives to zero.
SpeciesState step_imex(const SpeciesState& state, const ModelParams& p, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<SpeciesState> states;
  std::vector<double> total_mass;             // sum_i ||u_i||_L1 per sample
  std::vector<std::vector<double>> sup_norms;  // [sample][species]
  std::size_t clamped_nodes = 0;
};

/// Integrates to state.time + T, recording the initial state, every stride-th
/// step and the final state. Throws InvalidArgument if dt > dt_max(p) or T is
/// not a whole number of steps, BlowUp on a non-finite density.
Trajectory integrate_to(const SpeciesState& state, const ModelParams& p, double dt, double T,
                        std::size_t stride);

/// Number of steps covering T; throws InvalidArgument unless T/dt is integral.
std::size_t step_count(double T, double dt);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Unique positive solution of d Delta theta + theta (m - theta) = 0.
/// Time-marches to a 1e-10 plateau, then Newton-refines the discrete system.
/// Throws DegenerateSteadyState if the limit is zero or changes sign, and
/// SolverFailure if Newton does not converge.
Field solve_theta(double d, const Field& m);

/// E_0 = 0, E_i = theta_{d_i} in slot i (1-based), zeros elsewhere.
SpeciesState equilibrium(std::size_t i, const ModelParams& p);

/// U_k = sum_{i in I_k} u_i.
SpeciesState aggregate(const SpeciesState& state, const Partition& partition);

double sup_distance(const SpeciesState& a, const SpeciesState& b);

}  // namespace lvlab
