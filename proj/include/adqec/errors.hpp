#pragma once

#include <stdexcept>
#include <string>

namespace adqec {

/// Shapes or subsystem dimensions that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition (Hermiticity, positivity, normalization) failed.
class NumericalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested problem exceeds the dense block budget.
class BudgetError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// An SDP solve ended without reaching optimality.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document or configuration.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adqec
