#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfgcache {

// Process exit codes used by the CLI. Each exception type maps to one.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kNumeric = 3,
  kMissingArtifact = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kNumeric; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CflViolation : public NumericError {
 public:
  CflViolation(double dt, double bound)
      : NumericError("time step " + std::to_string(dt) +
                     " exceeds stability bound " + std::to_string(bound)),
        dt_(dt),
        bound_(bound) {}
  double dt() const noexcept { return dt_; }
  double bound() const noexcept { return bound_; }

 private:
  double dt_;
  double bound_;
};

class NegativeDensity : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteValue : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonConvergence : public NumericError {
 public:
  NonConvergence(int iterations, std::vector<double> residuals)
      : NumericError("fixed point did not converge after " +
                     std::to_string(iterations) + " iterations"),
        residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// L*p reached the backhaul capacity B; the barrier cost is infinite there.
class BarrierViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

class MissingArtifact : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override {
    return ExitCode::kMissingArtifact;
  }
};

}  // namespace mfgcache
