#include "lvlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "lvlab/error.hpp"
#include "lvlab/tridiag.hpp"

namespace lvlab {

namespace {

// Banded form of -d*Delta - diag(h) - shift.
struct ShiftedOperator {
  std::vector<double> sub, diag, super;
};

ShiftedOperator shifted_operator(double d, const Field& h, double shift) {
  const NeumannLaplacian lap(h.grid());
  const std::size_t n = h.size();
  ShiftedOperator op{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    op.sub[j] = -d * lap.sub()[j];
    op.diag[j] = -d * lap.diag()[j] - h[j] - shift;
    op.super[j] = -d * lap.super()[j];
  }
  return op;
}

void apply_operator(double d, const NeumannLaplacian& lap, const Field& h,
                    std::span<const double> v, std::span<double> out) {
  lap.apply(v, out);
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = -d * out[j] - h[j] * v[j];
}

double rayleigh_quotient(double d, const NeumannLaplacian& lap, const Field& h,
                         std::span<const double> v, std::vector<double>& scratch) {
  apply_operator(d, lap, h, v, scratch);
  const Grid& g = h.grid();
  return weighted_dot(g, v, scratch) / weighted_dot(g, v, v);
}

void normalize(const Grid& g, std::vector<double>& v) {
  const double nrm = l2_norm(g, v);
  for (double& x : v) x /= nrm;
}

void project_out(const Grid& g, std::vector<double>& v, std::span<const double> unit) {
  const double c = weighted_dot(g, v, unit);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * unit[j];
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, std::abs(a[j] - b[j]));
  return s;
}

void require_positive_d(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw InvalidArgument("diffusion rate must be positive, got " + std::to_string(d));
  }
}

}  // namespace

PrincipalPair principal_eigenpair(double d, const Field& h, const EigenOptions& opts) {
  require_positive_d(d);
  const Grid& g = h.grid();
  const std::size_t n = g.size();
  const double shift = -h.max() - 1.0;
  const ShiftedOperator op = shifted_operator(d, h, shift);
  const TridiagonalLU lu(op.sub, op.diag, op.super);
  const NeumannLaplacian lap(g);

  std::vector<double> v(n, 1.0), next(n), scratch(n);
  normalize(g, v);
  double lambda = rayleigh_quotient(d, lap, h, v, scratch);

  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    next = v;
    lu.solve(next);
    normalize(g, next);
    if (std::accumulate(next.begin(), next.end(), 0.0) < 0.0) {
      for (double& x : next) x = -x;
    }
    const double lambda_next = rayleigh_quotient(d, lap, h, next, scratch);
    const double dv = sup_diff(next, v);
    const double dl = std::abs(lambda_next - lambda);
    v.swap(next);
    lambda = lambda_next;
    if (dl < opts.rayleigh_tol && dv < opts.vector_tol) {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      if (*lo <= 0.0) {
        throw SolverFailure("principal eigenvector is not strictly positive (min " +
                                std::to_string(*lo) + ", max " + std::to_string(*hi) + ")",
                            dv);
      }
      apply_operator(d, lap, h, v, scratch);
      double residual = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        residual = std::max(residual, std::abs(-scratch[j] + lambda * v[j]));
      }
      return PrincipalPair{lambda, Field(g, std::move(v)), residual, it};
    }
  }
  apply_operator(d, lap, h, v, scratch);
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    residual = std::max(residual, std::abs(-scratch[j] + lambda * v[j]));
  }
  throw SolverFailure("inverse iteration did not converge in " +
                          std::to_string(opts.max_iterations) + " iterations",
                      residual);
}

double second_eigenvalue(double d, const Field& h, const EigenOptions& opts) {
  const PrincipalPair first = principal_eigenpair(d, h, opts);
  const Grid& g = h.grid();
  const std::size_t n = g.size();
  const ShiftedOperator op = shifted_operator(d, h, -h.max() - 1.0);
  const TridiagonalLU lu(op.sub, op.diag, op.super);
  const NeumannLaplacian lap(g);
  const std::span<const double> psi = first.psi.values();

  // Start from the lowest Neumann cosine mode with a small asymmetric tilt.
  std::vector<double> v(n), next(n), scratch(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.node(j) / g.length();
    v[j] = std::cos(std::numbers::pi * x) + 1e-3 * x * x;
  }
  project_out(g, v, psi);
  normalize(g, v);
  double lambda = rayleigh_quotient(d, lap, h, v, scratch);
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    next = v;
    lu.solve(next);
    project_out(g, next, psi);
    normalize(g, next);
    if (weighted_dot(g, next, v) < 0.0) {
      for (double& x : next) x = -x;
    }
    const double lambda_next = rayleigh_quotient(d, lap, h, next, scratch);
    const double dv = sup_diff(next, v);
    const double dl = std::abs(lambda_next - lambda);
    v.swap(next);
    lambda = lambda_next;
    if (dl < opts.rayleigh_tol && dv < opts.vector_tol) return lambda;
  }
  throw SolverFailure("deflated inverse iteration did not converge", std::abs(lambda));
}

double eigen_identity_residual(double d, const Field& m, const PrincipalPair& pair) {
  if (pair.psi.min() <= 0.0) {
    throw DomainError("eigen identity needs a strictly positive eigenfunction");
  }
  const double energy = dirichlet_energy(pair.psi, &pair.psi);
  return std::abs(d * energy + integrate(m) + pair.lambda * m.grid().length());
}

double d_lambda_formula(const PrincipalPair& pair) {
  const double mass = weighted_dot(pair.psi.grid(), pair.psi.values(), pair.psi.values());
  return dirichlet_energy(pair.psi) / mass;
}

double d_lambda_fd(double d, const Field& h, double delta, const EigenOptions& opts) {
  require_positive_d(d);
  if (delta <= 0.0) delta = 1e-4 * d;
  if (!(d - delta > 0.0)) {
    throw InvalidArgument("d_lambda_fd needs d - delta > 0");
  }
  const double up = principal_eigenpair(d + delta, h, opts).lambda;
  const double down = principal_eigenpair(d - delta, h, opts).lambda;
  return (up - down) / (2.0 * delta);
}

}  // namespace lvlab
