#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lvlab {

// Bad caller input: out-of-range sizes, mismatched grids, malformed sets.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematically required condition on the data does not hold
// (non-positive weight, evaluation singularity, sign-changing eigenvector).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative solver did not reach its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double last_residual)
      : std::runtime_error(what), residual_(last_residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The single-species steady state collapsed to zero or changed sign.
class DegenerateSteadyState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A trajectory produced a non-finite value.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lvlab
