#pragma once

#include <stdexcept>
#include <string>

namespace hyperns {

/// Parameter choice outside the admissible range of the construction
/// (exponent range, sequence spacing). The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed input. The CLI maps this to exit code 3.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or a violated stability guard during integration.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperns
