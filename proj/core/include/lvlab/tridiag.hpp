#pragma once

#include <span>
#include <vector>

namespace lvlab {

// Thomas algorithm for a[i]*x[i-1] + b[i]*x[i] + c[i]*x[i+1] = d[i].
// a[0] and c[n-1] are ignored. No pivoting: callers pass diagonally dominant
// or (after diagonal scaling) symmetric positive definite systems.
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(std::span<const double> sub, std::span<const double> diag,
                std::span<const double> super);

  std::size_t size() const noexcept { return diag_.size(); }

  /// Solves in place; rhs.size() must equal size().
  void solve(std::span<double> rhs) const;

 private:
  std::vector<double> sub_;
  std::vector<double> diag_;   // pivots
  std::vector<double> super_;  // c[i] / pivot[i]
};

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs);

}  // namespace lvlab
