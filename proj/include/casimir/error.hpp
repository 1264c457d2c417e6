/**
 * @file error.hpp
 * @brief Exception hierarchy shared by all modules.
 */
#ifndef CASIMIR_ERROR_HPP
#define CASIMIR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace casimir {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Drude permittivity queried at exactly zero frequency; use the born-strength limit instead.
class StaticDivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Result not representable (overflow); the message names the scaled alternative.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not reach its tolerance. Carries the best estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}
  explicit ConvergenceError(const std::string& what) : Error(what) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_ = 0.0;
  double error_estimate_ = 0.0;
};

/// Born series growing order over order.
class DivergenceError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Linear system numerically singular.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_estimate)
      : Error(what), condition_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

/// A configured resource cap (cell count, memory) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Input file or scene failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace casimir

#endif
