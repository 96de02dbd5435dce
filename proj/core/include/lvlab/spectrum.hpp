#pragma once

#include <cstddef>

#include "lvlab/grid.hpp"

namespace lvlab {

/// Principal eigenpair of -d*Delta - h with Neumann conditions, in the sign
/// convention d*Delta(psi) + h*psi + lambda*psi = 0. psi > 0, ||psi||_L2 = 1.
struct PrincipalPair {
  double lambda;
  Field psi;
  double residual;  // sup-norm of d*Delta(psi) + h*psi + lambda*psi
  std::size_t iterations;
};

struct EigenOptions {
  double rayleigh_tol = 1e-12;
  // Eigenvectors converge at the square root of the Rayleigh-quotient rate,
  // so the vector change is checked as well.
  double vector_tol = 1e-11;
  std::size_t max_iterations = 10000;
};

/// Inverse power iteration on -d*Delta - h - sigma with sigma = -(sup h) - 1,
/// started from the constant vector. Throws InvalidArgument if d <= 0,
/// SolverFailure on non-convergence or a sign-changing iterate.
PrincipalPair principal_eigenpair(double d, const Field& h, const EigenOptions& opts = {});

/// Second-lowest eigenvalue of the same operator by inverse iteration deflated
/// against the principal eigenvector in the trapezoid inner product.
double second_eigenvalue(double d, const Field& h, const EigenOptions& opts = {});

/// |d * int |psi'|^2/psi^2 + int m + lambda * L|: the divided, integrated
/// eigen-equation. Zero in the continuum; O(h^2) on the grid.
double eigen_identity_residual(double d, const Field& m, const PrincipalPair& pair);

/// d(lambda)/dd = int |psi'|^2 / int psi^2 (Hellmann-Feynman).
double d_lambda_formula(const PrincipalPair& pair);

/// Central difference (lambda(d+delta) - lambda(d-delta)) / (2 delta).
/// delta <= 0 selects the default 1e-4 * d.
double d_lambda_fd(double d, const Field& h, double delta = 0.0, const EigenOptions& opts = {});

}  // namespace lvlab
