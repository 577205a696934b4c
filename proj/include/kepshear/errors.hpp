#pragma once

#include <stdexcept>
#include <string>

namespace kepshear {

/// Violated precondition of a library operation. The CLI maps it to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A well-formed request whose data makes the operation meaningless
/// (e.g. a pushforward that puts all mass on the removed zero fiber).
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Work budget exceeded (quadrature panel caps, recursion depth).
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file could not be parsed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

}  // namespace kepshear
