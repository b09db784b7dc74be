#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace admira {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (operator dims, vector lengths, file headers).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t converged, std::size_t iterations)
      : Error(what), converged_(converged), iterations_(iterations) {}

  /// Number of quantities (singular triplets, ...) that did converge.
  std::size_t converged() const noexcept { return converged_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t converged_;
  std::size_t iterations_;
};

/// SVT iterates blew up (residual exceeded the divergence guard).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace admira
