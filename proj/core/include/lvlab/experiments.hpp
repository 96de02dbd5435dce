#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lvlab/dynamics.hpp"

namespace lvlab {

enum class Verdict { Excluded, Undecided };
const char* to_string(Verdict v) noexcept;

struct ExclusionOptions {
  double tol = 1e-3;       // sup distance to E_1 at the horizon
  std::size_t stride = 0;  // sampling stride in steps; 0 = one sample per time unit
};

struct ExclusionReport {
  ModelParams params;
  double T = 0.0;
  double dt = 0.0;
  double tol = 0.0;
  double final_distance = 0.0;           // ||u(T) - E_1||_Sup
  std::vector<double> slopes{};            // species 2..N: d/dt log sup(u_i/u_1), final half
  double aggregate_limsup = 0.0;         // max over final quarter of ||sum u - theta_{d1}||_Sup
  double theta1_sup = 0.0;
  double late_mass_max = 0.0;            // max total L1 mass over the final half
  double mass_bound = 0.0;               // 2 L sup m
  bool mass_bound_ok = false;
  std::size_t clamped_nodes = 0;
  Verdict verdict = Verdict::Undecided;

  // Sampled series for CSV export and the ratio-monotonicity check.
  std::vector<double> times{};
  std::vector<double> total_mass{};
  std::vector<std::vector<double>> sup_norms{};   // [sample][species]
  std::vector<std::vector<double>> log_ratios{};  // [species-2][sample]
};

/// Runs the competition system from interior data and classifies the outcome.
/// Requires strictly increasing diffusions and strictly positive u0.
ExclusionReport exclusion_experiment(const ModelParams& p, const SpeciesState& u0, double T,
                                     double dt, const ExclusionOptions& opts = {});

/// r_hat = 0.5 * inf over t and over the rates d_i of d H_1/d d along the
/// static path h = m - theta_{d_1}.
struct SlopeRate {
  double rhat = 0.0;
  std::vector<double> inf_derivative;  // per d_i
};
SlopeRate measured_slope_rate(const ModelParams& p, double dt);

/// s_i <= -(d_i - d_1) * rhat for each i >= 2.
std::vector<bool> slope_bound_holds(const ExclusionReport& r, double rhat);

struct ClosenessReport {
  double epsilon = 0.0;
  double T = 0.0;
  double gap = 0.0;       // sup_{[0,T]} ||P phi(t) - P phi_eps(t)||_Sup
  double gap_half = 0.0;  // same with every |d_i - hat d_k| halved
  double ratio = 0.0;     // gap_half / gap (0 when gap == 0)
};

/// Compares the blockwise-equal-rate system (rates hat_ds[k] on block k)
/// with the perturbed system (rates ds) after aggregation by `partition`.
ClosenessReport closeness_experiment(const Field& m, std::span<const double> hat_ds,
                                     std::span<const double> ds, const Partition& partition,
                                     const SpeciesState& u0, double T, double dt);

/// Aggregated gap sup over [0, T] for a single pair of rate vectors.
double aggregated_gap(const Field& m, std::span<const double> rates_a,
                      std::span<const double> rates_b, const Partition& partition,
                      const SpeciesState& u0, double T, double dt);

/// max(max_a min_b |a-b|, max_b min_a |a-b|). Throws InvalidArgument on an empty set.
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

/// Entry (i, j) = mu_1(d_i, m - theta_{d_j}).
std::vector<std::vector<double>> invasion_matrix(const ModelParams& p);

struct MorseLeg {
  std::string name;
  std::size_t target = 0;  // equilibrium index
  double distance = 0.0;
  bool passed = false;
};

struct MorseReport {
  std::vector<MorseLeg> legs;
  double tol = 0.0;
  bool passed = false;
};

/// Two-species Morse picture: interior -> E_1, face u_1 = 0 -> E_2, zero
/// stays E_0, E_2 + (1e-3, 0) -> E_1. Each leg must be within tol at T.
MorseReport dockery_morse_check(const ModelParams& p, double dt, double T, double tol = 1e-3);

/// Random diffusion sets with `sizes` elements whose Hausdorff distance to
/// `centers` is below `radius`. Every center receives at least one point.
std::vector<std::vector<double>> sample_hausdorff_sets(std::span<const double> centers,
                                                       double radius, std::size_t count,
                                                       std::uint64_t seed,
                                                       std::span<const std::size_t> sizes);

struct SweepEntry {
  std::vector<double> diffusions;
  double hausdorff = 0.0;
  std::optional<ExclusionReport> report;
  std::string error;
};

/// Runs exclusion_experiment for every set on a pool of `workers` threads.
/// Results keep the input order.
std::vector<SweepEntry> run_sweep(const Grid& g, const Field& m,
                                  const std::vector<std::vector<double>>& sets,
                                  std::span<const double> centers, double u0, double T, double dt,
                                  std::size_t workers, const ExclusionOptions& opts = {});

}  // namespace lvlab
