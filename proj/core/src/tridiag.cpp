#include "lvlab/tridiag.hpp"

#include <string>

#include "lvlab/error.hpp"

namespace lvlab {

TridiagonalLU::TridiagonalLU(std::span<const double> sub, std::span<const double> diag,
                             std::span<const double> super)
    : sub_(sub.begin(), sub.end()), diag_(diag.size()), super_(diag.size()) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || n == 0) {
    throw InvalidArgument("tridiagonal bands must be non-empty and of equal length");
  }
  diag_[0] = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) diag_[i] = diag[i] - sub[i] * super_[i - 1];
    if (diag_[i] == 0.0) {
      throw InternalError("tridiagonal solve: zero pivot at row " + std::to_string(i));
    }
    super_[i] = (i + 1 < n) ? super[i] / diag_[i] : 0.0;
  }
}

void TridiagonalLU::solve(std::span<double> rhs) const {
  const std::size_t n = diag_.size();
  if (rhs.size() != n) throw InvalidArgument("tridiagonal solve: right-hand side size mismatch");
  rhs[0] /= diag_[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - sub_[i] * rhs[i - 1]) / diag_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= super_[i] * rhs[i + 1];
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs) {
  TridiagonalLU lu(sub, diag, super);
  std::vector<double> x(rhs.begin(), rhs.end());
  lu.solve(x);
  return x;
}

}  // namespace lvlab
