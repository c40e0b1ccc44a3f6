#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernpred {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape, symmetry, or dimension mismatch in an input.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Trend constraints that are rank deficient or violated by a weight vector.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// A factorization broke down. `pivot()` is the zero-based index of the
/// first pivot that failed.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, std::size_t pivot)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Argument outside the domain of an operation (e.g. evaluation point
/// outside the knot range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A derived object failed its own consistency check after construction.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace kernpred
