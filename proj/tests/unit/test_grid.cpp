#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "lvlab/error.hpp"
#include "lvlab/grid.hpp"

using namespace lvlab;
using std::numbers::pi;

namespace {

Field from(const Grid& g, auto fn) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = fn(g.node(j));
  return Field(g, std::move(v));
}

}  // namespace

TEST_CASE("build_grid spacing and nodes") {
  const Grid a = build_grid(1.0, 3);
  CHECK(a.spacing() == 0.5);
  CHECK(a.node(0) == 0.0);
  CHECK(a.node(1) == 0.5);
  CHECK(a.node(2) == 1.0);
  CHECK(build_grid(2.0, 5).spacing() == 0.5);
  CHECK(build_grid(1.0, 201).spacing() == doctest::Approx(0.005).epsilon(1e-15));

  const Grid g(3.7, 97);
  CHECK(g.node(96) == 3.7);
  CHECK(std::abs(g.spacing() * 96 - 3.7) < 1e-15);
}

TEST_CASE("build_grid rejects bad input") {
  CHECK_THROWS_AS(build_grid(0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(build_grid(-1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(build_grid(1.0, 2), InvalidArgument);
}

TEST_CASE("field invariants") {
  const Grid g(1.0, 5);
  CHECK_THROWS_AS(Field(g, std::vector<double>(4, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(Field(g, std::vector<double>{0, 1, NAN, 0, 0}), DomainError);
  CHECK_THROWS_AS(Field(g, 1.0) + Field(Grid(1.0, 6), 1.0), InvalidArgument);
}

TEST_CASE("laplacian of constants and quadratics") {
  const Grid g(1.0, 11);
  const NeumannLaplacian lap(g);
  const Field c = laplacian_apply(lap, Field(g, 3.25));
  for (double v : c.values()) CHECK(v == 0.0);

  const Field q = laplacian_apply(lap, from(g, [](double x) { return x * x; }));
  for (std::size_t j = 1; j + 1 < g.size(); ++j) CHECK(q[j] == doctest::Approx(2.0).epsilon(1e-10));

  // Zero row sums.
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(lap.sub()[j] + lap.diag()[j] + lap.super()[j] == 0.0);
  }
  CHECK_THROWS_AS(laplacian_apply(lap, Field(Grid(1.0, 12), 1.0)), InvalidArgument);
}

TEST_CASE("cosine modes are exact discrete eigenvectors") {
  const Grid g(2.0, 41);
  const NeumannLaplacian lap(g);
  const double h = g.spacing(), L = g.length();
  for (int k = 0; k <= 5; ++k) {
    const Field f = from(g, [&](double x) { return std::cos(k * pi * x / L); });
    const double eig = -(2.0 / (h * h)) * (1.0 - std::cos(k * pi * h / L));
    const Field lf = laplacian_apply(lap, f);
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(std::abs(lf[j] - eig * f[j]) < 1e-9 * (1.0 + std::abs(eig)));
    }
  }
}

TEST_CASE("integrate of a Neumann laplacian vanishes") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g(0.5 + 2.0 * std::abs(u(rng)), 5 + static_cast<std::size_t>(trial));
    std::vector<double> v(g.size());
    for (double& x : v) x = u(rng);
    const Field f(g, v);
    const Field lf = laplacian_apply(NeumannLaplacian(g), f);
    const double scale = norm(lf, NormKind::L1) + 1.0;
    CHECK(std::abs(integrate(lf)) < 1e-13 * scale);
  }
}

TEST_CASE("integrate") {
  CHECK(integrate(Field(Grid(2.5, 7), 1.5)) == doctest::Approx(3.75).epsilon(1e-14));
  CHECK(integrate(from(Grid(1.0, 11), [](double x) { return x; })) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(integrate(from(Grid(1.0, 201), [](double x) { return std::cos(pi * x); }))) <
        1e-4);
}

TEST_CASE("norms") {
  const Grid g(1.0, 21);
  const Field one(g, 1.0);
  CHECK(norm(one, NormKind::L1) == doctest::Approx(1.0));
  CHECK(norm(one, NormKind::L2) == doctest::Approx(1.0));
  CHECK(norm(one, NormKind::Sup) == 1.0);
  const Field zero(g, 0.0);
  CHECK(norm(zero, NormKind::L1) == 0.0);
  CHECK(norm(zero, NormKind::L2) == 0.0);
  CHECK(norm(zero, NormKind::Sup) == 0.0);

  const Field c = from(Grid(1.0, 401), [](double x) { return std::cos(pi * x); });
  CHECK(std::abs(norm(c, NormKind::L2) - std::sqrt(0.5)) < 1e-4);
}

TEST_CASE("norms are absolutely homogeneous") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Grid g(1.3, 33);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(g.size());
    for (double& x : v) x = u(rng);
    const Field f(g, v);
    const double a = u(rng);
    for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Sup}) {
      CHECK(norm(f * a, k) == doctest::Approx(std::abs(a) * norm(f, k)).epsilon(1e-13));
    }
  }
}

TEST_CASE("dirichlet energy") {
  const Grid g(1.0, 401);
  const Field c(g, 2.0);
  const Field w = from(g, [](double x) { return 1.0 + x; });
  CHECK(dirichlet_energy(c) == 0.0);
  CHECK(dirichlet_energy(c, &w) == 0.0);
  CHECK(dirichlet_energy(from(g, [](double x) { return x; })) == doctest::Approx(1.0).epsilon(1e-12));
  const Field cosf = from(g, [](double x) { return std::cos(pi * x); });
  CHECK(std::abs(dirichlet_energy(cosf) - pi * pi / 2.0) < 1e-3);

  const Field bad = from(g, [](double x) { return x - 0.5; });
  CHECK_THROWS_AS(dirichlet_energy(cosf, &bad), DomainError);
}
