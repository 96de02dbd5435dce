#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "lvlab/error.hpp"
#include "lvlab/tridiag.hpp"

using namespace lvlab;

TEST_CASE("thomas matches a dense LU solve on diagonally dominant systems") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) * 3;
    std::vector<double> a(n), b(n), c(n), d(n);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = i > 0 ? u(rng) : 0.0;
      c[i] = i + 1 < n ? u(rng) : 0.0;
      b[i] = 2.5 + std::abs(u(rng));
      d[i] = u(rng);
      dense(i, i) = b[i];
      if (i > 0) dense(i, i - 1) = a[i];
      if (i + 1 < n) dense(i, i + 1) = c[i];
    }
    const auto x = solve_tridiagonal(a, b, c, d);
    const Eigen::VectorXd ref =
        dense.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(d.data(), n));
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-12));
  }
}

TEST_CASE("factorisation can be reused") {
  std::vector<double> a{0, -1, -1, -2}, b{3, 3, 3, 3}, c{-2, -1, -1, 0};
  const TridiagonalLU lu(a, b, c);
  std::vector<double> r1{1, 1, 1, 1}, r2{1, 0, 0, 1};
  lu.solve(r1);
  lu.solve(r2);
  CHECK(r1 == solve_tridiagonal(a, b, c, std::vector<double>{1, 1, 1, 1}));
  CHECK(r2 == solve_tridiagonal(a, b, c, std::vector<double>{1, 0, 0, 1}));
}

TEST_CASE("errors") {
  std::vector<double> z{0, 0}, one{1, 1};
  CHECK_THROWS_AS(TridiagonalLU(z, z, z), InternalError);
  CHECK_THROWS_AS(TridiagonalLU(one, std::vector<double>{1, 1, 1}, one), InvalidArgument);
  const TridiagonalLU lu(z, one, z);
  std::vector<double> bad(3, 1.0);
  CHECK_THROWS_AS(lu.solve(bad), InvalidArgument);
}
