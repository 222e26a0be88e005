#pragma once

#include <stdexcept>
#include <string>

namespace epe {

// Exception hierarchy. The CLI maps the three families onto exit codes
// (validation -> 1, numerical -> 2, io -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NonPositiveParameter : public ValidationError {
 public:
  explicit NonPositiveParameter(const std::string& name)
      : ValidationError("parameter '" + name + "' must be strictly positive"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class H1Violated : public ValidationError {
 public:
  H1Violated(double L, double sigma, double kappa)
      : ValidationError("coupling bound violated: need 0 < L < sqrt(sigma*kappa), got L=" +
                        std::to_string(L) + ", sigma=" + std::to_string(sigma) +
                        ", kappa=" + std::to_string(kappa)) {}
};

class InvalidGrid : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSubdivision : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedDegree : public ValidationError {
 public:
  explicit UnsupportedDegree(int degree)
      : ValidationError("unsupported quadrature degree " + std::to_string(degree) +
                        " (supported: 1..6)") {}
};

class LayoutMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateCell : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotConverged : public NumericalError {
 public:
  NotConverged(int iterations, double residual)
      : NumericalError("solver did not converge after " + std::to_string(iterations) +
                       " iterations (relative residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace epe
