#include "lvlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lvlab/error.hpp"

namespace lvlab {

Grid::Grid(double length, std::size_t n_nodes) : length_(length), n_(n_nodes), h_(0.0) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("grid length must be positive and finite, got " + std::to_string(length));
  }
  if (n_nodes < 3) {
    throw InvalidArgument("grid needs at least 3 nodes, got " + std::to_string(n_nodes));
  }
  h_ = length / static_cast<double>(n_nodes - 1);
}

double Grid::node(std::size_t j) const noexcept {
  // Pin the last node so the span is [0, L] exactly.
  return j + 1 == n_ ? length_ : static_cast<double>(j) * h_;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

double Grid::weight(std::size_t j) const noexcept {
  return (j == 0 || j + 1 == n_) ? 0.5 * h_ : h_;
}

Grid build_grid(double length, std::size_t n_nodes) { return Grid(length, n_nodes); }

Field::Field(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {
  if (!std::isfinite(value)) throw DomainError("field value must be finite");
}

Field::Field(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values but grid has " +
                          std::to_string(grid_.size()) + " nodes");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw DomainError("field value at node " + std::to_string(j) + " is not finite");
    }
  }
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidArgument("fields live on different grids");
}
}  // namespace

Field Field::operator+(const Field& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += o.values_[j];
  return Field(grid_, std::move(v));
}

Field Field::operator-(const Field& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= o.values_[j];
  return Field(grid_, std::move(v));
}

Field Field::operator*(double s) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= s;
  return Field(grid_, std::move(v));
}

Field Field::operator+(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x += c;
  return Field(grid_, std::move(v));
}

NeumannLaplacian::NeumannLaplacian(const Grid& grid)
    : grid_(grid), sub_(grid.size()), diag_(grid.size()), sup_(grid.size()) {
  const std::size_t n = grid.size();
  const double s = 1.0 / (grid.spacing() * grid.spacing());
  for (std::size_t j = 0; j < n; ++j) {
    sub_[j] = s;
    diag_[j] = -2.0 * s;
    sup_[j] = s;
  }
  sub_[0] = 0.0;
  sup_[0] = 2.0 * s;
  sub_[n - 1] = 2.0 * s;
  sup_[n - 1] = 0.0;
}

void NeumannLaplacian::apply(std::span<const double> f, std::span<double> out) const {
  const std::size_t n = diag_.size();
  out[0] = diag_[0] * f[0] + sup_[0] * f[1];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = sub_[j] * f[j - 1] + diag_[j] * f[j] + sup_[j] * f[j + 1];
  }
  out[n - 1] = sub_[n - 1] * f[n - 2] + diag_[n - 1] * f[n - 1];
}

Field laplacian_apply(const NeumannLaplacian& op, const Field& f) {
  if (!(op.grid() == f.grid())) {
    throw InvalidArgument("laplacian_apply: field grid does not match operator grid");
  }
  std::vector<double> out(f.size());
  op.apply(f.values(), out);
  return Field(f.grid(), std::move(out));
}

double weighted_dot(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += grid.weight(j) * a[j] * b[j];
  return s;
}

double l2_norm(const Grid& grid, std::span<const double> a) {
  return std::sqrt(weighted_dot(grid, a, a));
}

double integrate(const Field& f) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += g.weight(j) * f[j];
  return s;
}

double norm(const Field& f, NormKind kind) {
  const Grid& g = f.grid();
  switch (kind) {
    case NormKind::L1: {
      double s = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) s += g.weight(j) * std::abs(f[j]);
      return s;
    }
    case NormKind::L2:
      return l2_norm(g, f.values());
    case NormKind::Sup: {
      double s = 0.0;
      for (double v : f.values()) s = std::max(s, std::abs(v));
      return s;
    }
  }
  throw InternalError("unknown norm kind");
}

double dirichlet_energy(const Field& f, const Field* weight) {
  const Grid& g = f.grid();
  if (weight != nullptr) {
    require_same_grid(g, weight->grid());
    for (std::size_t j = 0; j < weight->size(); ++j) {
      if (!((*weight)[j] > 0.0)) {
        throw DomainError("dirichlet_energy: weight is not positive at node " + std::to_string(j));
      }
    }
  }
  const double h = g.spacing();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < f.size(); ++j) {
    const double grad = (f[j + 1] - f[j]) / h;
    double e = grad * grad;
    if (weight != nullptr) {
      const double w = 0.5 * ((*weight)[j] + (*weight)[j + 1]);
      e /= w * w;
    }
    s += e * h;
  }
  return s;
}

}  // namespace lvlab
