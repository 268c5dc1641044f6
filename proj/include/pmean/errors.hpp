#pragma once

#include <stdexcept>
#include <string>

namespace pmean {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution parameters or malformed user input.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the operation is defined
/// (p outside the p-domain, x on the support boundary, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The distribution mini-language or a JSON document could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A caller-asserted precondition failed a spot check.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested accuracy within its budget.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// The integrand returned NaN or an infinite value.
class IntegrandError : public Error {
 public:
  IntegrandError(const std::string& what, double abscissa) : Error(what), abscissa_(abscissa) {}

  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

/// No sign change of the balance function could be bracketed.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Too many failed points while tracing a p-mean curve.
class CurveError : public Error {
 public:
  using Error::Error;
};

/// Iterative minimisation did not converge.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, std::size_t iterations, double gradient_norm)
      : Error(what), iterations_(iterations), gradient_norm_(gradient_norm) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::size_t iterations_;
  double gradient_norm_;
};

/// A quantity is undefined for the given input (e.g. no reliable tangents).
class UndefinedResultError : public Error {
 public:
  using Error::Error;
};

}  // namespace pmean
