#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rdo {

// Bad argument to a library operation (empty set, out-of-range index, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive check requested beyond the configured node ceiling.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Function data that violates the objective's invariants (non-symmetric or non-PD Q).
class InvalidFunction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Trajectory or file data missing fields needed by a verifier.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario that fails validation. Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid scenario:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace rdo
