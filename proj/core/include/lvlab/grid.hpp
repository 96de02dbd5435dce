#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lvlab {

/// Uniform nodes x_j = j*h on [0, L], j = 0..n_nodes-1.
class Grid {
 public:
  /// Throws InvalidArgument unless length > 0 and n_nodes >= 3.
  Grid(double length, std::size_t n_nodes);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double node(std::size_t j) const noexcept;
  std::vector<double> nodes() const;

  /// Trapezoid quadrature weight of node j (h/2 at the ends, h inside).
  double weight(std::size_t j) const noexcept;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.length_ == b.length_ && a.n_ == b.n_;
  }

 private:
  double length_;
  std::size_t n_;
  double h_;
};

Grid build_grid(double length, std::size_t n_nodes);

/// A scalar function sampled on the nodes of a grid. Values are always finite.
class Field {
 public:
  explicit Field(const Grid& grid, double value = 0.0);
  /// Throws InvalidArgument on size mismatch, DomainError on a non-finite value.
  Field(const Grid& grid, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  double min() const;
  double max() const;

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field operator*(double s) const;
  Field operator+(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Second-order Neumann Laplacian with ghost-node reflection at both ends:
/// interior rows (1, -2, 1)/h^2, boundary rows (-2, 2)/h^2.
class NeumannLaplacian {
 public:
  explicit NeumannLaplacian(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> sub() const noexcept { return sub_; }
  std::span<const double> diag() const noexcept { return diag_; }
  std::span<const double> super() const noexcept { return sup_; }

  /// out = Delta_h f; out and f must both have grid.size() entries.
  void apply(std::span<const double> f, std::span<double> out) const;

 private:
  Grid grid_;
  std::vector<double> sub_, diag_, sup_;
};

Field laplacian_apply(const NeumannLaplacian& op, const Field& f);

enum class NormKind { L1, L2, Sup };

/// Trapezoid rule on the field's grid.
double integrate(const Field& f);
double norm(const Field& f, NormKind kind);

/// Midpoint-quadrature energy sum_j ((f_{j+1}-f_j)/h)^2 / w_mid^2 * h, where
/// w_mid is the mean of adjacent weight values (w = 1 without a weight).
/// Throws DomainError if any weight value is <= 0.
double dirichlet_energy(const Field& f, const Field* weight = nullptr);

// Raw-span kernels shared by the solvers. `grid` supplies the quadrature weights.
double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b);
double l2_norm(const Grid& grid, std::span<const double> a);

}  // namespace lvlab
