#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpsav {

/// Precondition violations: bad sizes, grid mismatch, out-of-range stage count.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for this configuration (e.g. rotation in 1D).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Fixed-point iteration for the stage equations did not reach tolerance.
class StepDiverged : public std::runtime_error {
 public:
  StepDiverged(const std::string& what, double residual, int iterations,
               std::ptrdiff_t step_index = -1)
      : std::runtime_error(what),
        residual_(residual),
        iterations_(iterations),
        step_index_(step_index) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }
  /// -1 when raised by a single step outside evolve().
  std::ptrdiff_t step_index() const noexcept { return step_index_; }

 private:
  double residual_;
  int iterations_;
  std::ptrdiff_t step_index_;
};

/// NaN or Inf appeared in the stage iterates.
class NumericalBlowup : public std::runtime_error {
 public:
  explicit NumericalBlowup(const std::string& what, std::ptrdiff_t step_index = -1)
      : std::runtime_error(what), step_index_(step_index) {}

  std::ptrdiff_t step_index() const noexcept { return step_index_; }

 private:
  std::ptrdiff_t step_index_;
};

/// Convergence rate requested for a non-positive error (error floor reached).
class UndefinedRate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpsav
