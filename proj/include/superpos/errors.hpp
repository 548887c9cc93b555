#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace superpos {

// Base of every numeric failure; the CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureFailure : public NumericError {
 public:
  QuadratureFailure(const std::string& msg, std::complex<double> partial, double err)
      : NumericError(msg), partial_estimate(partial), error_estimate(err) {}
  std::complex<double> partial_estimate;
  double error_estimate;
};

class NonFiniteIntegrand : public NumericError {
 public:
  NonFiniteIntegrand(const std::string& msg, double x) : NumericError(msg), abscissa(x) {}
  double abscissa;
};

// Raised when a contour passes too close to a zero of the tracked function.
class ContourTooCloseToZero : public NumericError {
 public:
  ContourTooCloseToZero(const std::string& msg, std::complex<double> where)
      : NumericError(msg), point(where) {}
  std::complex<double> point;
};

// Input outside an operation's domain (distinct from numeric breakdown).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace superpos
