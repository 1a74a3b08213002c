#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gms {

/// Base of every error raised by the library. `exit_code()` is the CLI
/// contract: 2 for domain/validation failures, 3 for convergence and
/// generation failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual int exit_code() const { return 2; }
};

class InvalidCell : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Direct evaluation of E_n requested too close to a lattice point.
class NearSingularity : public Error {
 public:
  using Error::Error;
};

/// A required structural sum is absent from the supplied table.
class DependencyError : public Error {
 public:
  using Error::Error;
};

/// An Eisenstein order beyond the kernel cache was requested.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class PoleError : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
 public:
  GenerationFailure(const std::string& what, int placed, long long attempts)
      : Error(what), placed_(placed), attempts_(attempts) {}
  int exit_code() const override { return 3; }
  int placed() const { return placed_; }
  long long attempts() const { return attempts_; }

 private:
  int placed_;
  long long attempts_;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  int exit_code() const override { return 3; }
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace gms
