#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dense_spectrum.hpp"
#include "lvlab/dynamics.hpp"
#include "lvlab/error.hpp"
#include "lvlab/expr.hpp"
#include "lvlab/spectrum.hpp"

using namespace lvlab;

namespace {

const char* kM = "1 + 0.5*cos(3.141592653589793*x)";

Field m_on(const Grid& g) { return sample(parse(kM), g, 0.0); }

}  // namespace

TEST_CASE("constant coefficients give exact eigenvalues") {
  const Grid g(1.0, 201);
  const auto zero = principal_eigenpair(0.7, Field(g, 0.0));
  CHECK(std::abs(zero.lambda) < 1e-12);
  for (double v : zero.psi.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  const auto c = principal_eigenpair(0.3, Field(g, 2.5));
  CHECK(std::abs(c.lambda + 2.5) < 1e-12);
  CHECK(norm(c.psi, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("principal eigenvalue matches the dense oracle") {
  for (std::size_t n : {51u, 201u}) {
    const Grid g(1.0, n);
    const Field m = m_on(g);
    const std::vector<std::pair<double, Field>> cases{
        {0.1, m},
        {1.0, m},
        {0.05, sample(parse("3*x*x - 1"), g, 0.0)},
        {2.0, sample(parse("sin(7*x) + x"), g, 0.0)},
    };
    for (const auto& [d, h] : cases) {
      const double ref = oracle::dense_eigenvalues(d, h).front();
      CHECK(std::abs(principal_eigenpair(d, h).lambda - ref) < 1e-10);
    }
  }
}

TEST_CASE("second eigenvalue matches the dense oracle") {
  const Grid g(1.0, 201);
  const Field h = m_on(g);
  for (double d : {0.1, 0.3, 1.0}) {
    const auto ev = oracle::dense_eigenvalues(d, h);
    CHECK(std::abs(second_eigenvalue(d, h) - ev[1]) < 1e-8);
  }
  // Flat h: lambda_2 - lambda_1 = d (2/h^2)(1 - cos(pi h)).
  const double hs = g.spacing();
  const double expect = 0.4 * (2.0 / (hs * hs)) * (1.0 - std::cos(std::numbers::pi * hs));
  CHECK(second_eigenvalue(0.4, Field(g, 1.0)) - (-1.0) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("eigenvector is positive, unit and satisfies the equation") {
  const Grid g(2.0, 301);
  const Field h = sample(parse("cos(5*x) - 0.5*x"), g, 0.0);
  const auto p = principal_eigenpair(0.2, h);
  CHECK(p.psi.min() > 0.0);
  CHECK(norm(p.psi, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(p.residual < 1e-6);
}

TEST_CASE("shift covariance and monotonicity in h") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g(1.0, 101);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.size());
    for (double& x : v) x = u(rng);
    const Field h(g, v);
    const double d = 0.05 + std::abs(u(rng));
    const double c = 2.0 * u(rng);
    const double base = principal_eigenpair(d, h).lambda;
    CHECK(principal_eigenpair(d, h + c).lambda == doctest::Approx(base - c).epsilon(1e-10));
    CHECK(principal_eigenpair(d, h + 0.1).lambda < base);
  }
}

TEST_CASE("strictly increasing in d for non-constant h") {
  const Grid g(1.0, 201);
  const Field h = m_on(g);
  double prev = -1e300;
  for (double d : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double l = principal_eigenpair(d, h).lambda;
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("integrated identity converges at second order") {
  // Residual values frozen from this code at n = 401; the continuum value is 0.
  double prev = 0.0;
  for (std::size_t n : {101u, 201u, 401u, 801u}) {
    const Grid g(1.0, n);
    const Field m = m_on(g);
    const auto p = principal_eigenpair(0.5, m);
    const double r = eigen_identity_residual(0.5, m, p);
    CHECK(r < 10.0 * g.spacing() * g.spacing());
    if (prev > 0.0) CHECK(prev / r == doctest::Approx(4.0).epsilon(0.1));
    prev = r;
  }
}

TEST_CASE("lambda derivative formula agrees with central differences") {
  const Grid g(1.0, 401);
  const Field m = m_on(g);
  for (double d : {0.1, 0.3, 1.0}) {
    const auto p = principal_eigenpair(d, m);
    const double f = d_lambda_formula(p), fd = d_lambda_fd(d, m);
    CHECK(f > 0.0);
    CHECK(std::abs(fd - f) < 1e-4 * f);
  }
  // Truncation error of the central difference shrinks 4x per halving.
  const double f = d_lambda_formula(principal_eigenpair(0.3, m));
  const double e1 = std::abs(d_lambda_fd(0.3, m, 0.08) - f);
  const double e2 = std::abs(d_lambda_fd(0.3, m, 0.04) - f);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  // Flat coefficient: lambda does not depend on d.
  CHECK(d_lambda_formula(principal_eigenpair(0.3, Field(g, 1.0))) < 1e-12);
}

TEST_CASE("invalid input") {
  const Grid g(1.0, 11);
  CHECK_THROWS_AS(principal_eigenpair(0.0, Field(g, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(principal_eigenpair(-1.0, Field(g, 1.0)), InvalidArgument);
}
