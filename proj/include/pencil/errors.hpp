#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pencil {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside [0, pi] or otherwise outside a function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix or list dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on a numeric argument (empty window, n_scan < 2, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Boundary matrices fail the admissibility conditions.
class InvalidBoundaryError : public Error {
 public:
  using Error::Error;
};

/// Problem data breaks a structural requirement (non-diagonal P, bad spec).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Integration produced a non-finite state.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, std::size_t node, double lambda)
      : Error(what), node_(node), lambda_(lambda) {}

  std::size_t node() const { return node_; }
  double lambda() const { return lambda_; }

 private:
  std::size_t node_;
  double lambda_;
};

/// det W has no sign change across a bisection bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Iteration cap hit during refinement.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A search window endpoint sits on (or next to) an eigenvalue.
class AmbiguousWindowError : public Error {
 public:
  using Error::Error;
};

/// Goursat marching exceeded the instability threshold.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::size_t i, std::size_t k)
      : Error(what), i_(i), k_(k) {}

  std::size_t row() const { return i_; }
  std::size_t column() const { return k_; }

 private:
  std::size_t i_;
  std::size_t k_;
};

/// A theorem's hypothesis (alpha(pi) = 0, Neumann data) is not met.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Spectra computed on different windows cannot be compared.
class ComparisonError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem or run configuration. Line and column are 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace pencil
