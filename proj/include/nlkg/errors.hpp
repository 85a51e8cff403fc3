// Error categories that the command line maps to exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace nlkg {

// Invalid scenario or arguments (exit code 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN, overflow or step-control failure during a computation (exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nlkg
