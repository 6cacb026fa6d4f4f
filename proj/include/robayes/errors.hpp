#pragma once

#include <stdexcept>
#include <string>

namespace robayes {

// Exit-code contract used by the CLI:
//   ConfigError -> 1, PreconditionError -> 2, InvariantError -> 3.

/// Malformed or inconsistent user input (config files, CLI arguments).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A documented operation precondition does not hold for the given arguments.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal postcondition or structural invariant failed; indicates a bug
/// or numerically hopeless input, never a user error.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace robayes
