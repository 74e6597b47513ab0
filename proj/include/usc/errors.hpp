#pragma once

#include <stdexcept>
#include <string>

namespace usc {

/// Malformed input: bad rational literal, wrong map count, offsets outside
/// the admissible box, unknown family parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested level would create more cells (or skeleton vertices) than the
/// configured budget allows.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver did not reach the requested tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A network or skeleton that must be connected is not.
class DisconnectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistically or geometrically degenerate request (single-pair fits,
/// empty annulus complements, constant boundary data).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace usc
