#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netenergy {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on an argument (out-of-range index, bad weight, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Vector/matrix shapes that do not line up.
class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed input document (scenario file, CSV, config).
class ParseError : public Error {
 public:
  using Error::Error;
};

// The optimization or load problem has no feasible point.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<std::size_t> overloaded = {})
      : Error(what), overloaded_(std::move(overloaded)) {}

  const std::vector<std::size_t>& overloaded() const noexcept { return overloaded_; }

 private:
  std::vector<std::size_t> overloaded_;
};

// Floating-point breakdown: non-PD covariance, singular basis, ...
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An interference mapping produced NaN, inf or a negative value.
class MalformedMappingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Fixed-point iteration ran out of budget. For standard interference
// mappings this usually means no fixed point exists.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> lower, std::vector<double> upper,
                   std::size_t iterations)
      : NumericalError(what),
        lower_(std::move(lower)),
        upper_(std::move(upper)),
        iterations_(iterations) {}

  const std::vector<double>& last_lower() const noexcept { return lower_; }
  // Empty when the solver ran without an upper bounding sequence.
  const std::vector<double>& last_upper() const noexcept { return upper_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::size_t iterations_;
};

// Broken internal invariant (e.g. MM descent violated). Indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace netenergy
