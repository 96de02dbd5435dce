#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "lvlab/dynamics.hpp"
#include "lvlab/expr.hpp"
#include "lvlab/grid.hpp"

namespace lvlab {

/// A coefficient h(x, t) for the linear problem psi_t = d Delta psi + h psi.
///
/// Sampled paths are interpolated linearly in t and extended outside their
/// recorded window by even reflection about the window ends, so they can be
/// evaluated at any t (spin-up starts before the recorded window).
class CoefficientPath {
 public:
  static CoefficientPath constant(Field h);
  static CoefficientPath expression(Expr e, const Grid& g);
  /// times strictly increasing, one field per time, all on one grid.
  static CoefficientPath sampled(std::vector<double> times, std::vector<Field> fields);
  /// h(x, t) = m(x) - sum_j u_j(x, t) along the recorded trajectory.
  static CoefficientPath from_trajectory(const Trajectory& traj, const Field& m);

  /// Adds e(x, t) on top of this path.
  CoefficientPath plus(Expr e) const;

  const Grid& grid() const noexcept { return grid_; }
  bool is_static() const noexcept;
  void sample(double t, std::span<double> out) const;
  Field at(double t) const;

 private:
  struct Sampled {
    std::vector<double> times;
    std::vector<std::vector<double>> values;
  };
  CoefficientPath(Grid g, std::variant<Field, Expr, Sampled> kind)
      : grid_(std::move(g)), kind_(std::move(kind)) {}

  Grid grid_;
  std::variant<Field, Expr, Sampled> kind_;
  std::optional<Expr> extra_;
};

struct BundleTrajectory {
  double d = 0.0;
  double spinup = 0.0;
  std::vector<double> times;
  std::vector<Field> psi;              // psi_1(., t_n), unit L2 norm
  std::vector<double> H;               // H_1(t_n) from the renormalisation factors
  std::vector<double> H_quotient;      // -<psi, d_t psi>/<psi, psi>, cross-check only
  double harnack = 0.0;                // max over t_n of sup psi / inf psi
  double normalization_error = 0.0;    // max |  ||psi||_L2 - 1 |
};

struct BundleOptions {
  std::size_t record_stride = 1;
};

/// Spin-up long enough to forget the initial data: 50 / (lambda_2 - lambda_1)
/// of the path frozen at time t.
double default_spinup(double d, const CoefficientPath& path, double t);

/// Normalised principal bundle on [t0, t1]. Starting from a positive constant
/// at t0 - spinup, each step solves (I - dt (d Delta + h(t_{n+1}))) phi' = phi,
/// sets H_1(t_{n+1}) = (1/rho - 1)/dt with rho = ||phi'||_L2, and renormalises.
/// spinup < 0 selects default_spinup(d, path, t0).
BundleTrajectory compute_bundle(double d, const CoefficientPath& path, double t0, double t1,
                                double spinup, double dt, const BundleOptions& opts = {});

void write_bundle_csv(const BundleTrajectory& b, std::ostream& out);

/// w - <w, psi1> psi1 in the trapezoid L2 inner product.
Field project_off_bundle(const Field& w, const Field& psi1);

struct SeparationEstimate {
  double gamma = 0.0;                 // min over trials
  std::vector<double> trial_rates;
  bool truncated = false;
};

/// Decay rate of components complementary to the bundle: evolves random w
/// orthogonal to psi_1 under w_t = d Delta w + h w + H_1 w, re-projecting at
/// every step, and fits log ||w|| over the second half of [t0, t1].
SeparationEstimate separation_rate(double d, const CoefficientPath& path, double t0, double t1,
                                   double dt, std::size_t trials, std::uint64_t seed = 42,
                                   double spinup = -1.0);

struct BundleDerivative {
  std::vector<double> times;
  std::vector<double> values;  // d H_1 / d d at each time
  double min() const;
};

/// Central differences of H_1 in d from two bundles with identical spin-up
/// and dt. delta <= 0 selects 1e-3 * d. The two runs execute concurrently.
BundleDerivative bundle_d_derivative(double d, const CoefficientPath& path, double t0, double t1,
                                     double delta, double dt, double spinup = -1.0);

}  // namespace lvlab
