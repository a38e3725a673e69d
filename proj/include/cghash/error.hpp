#pragma once

#include <stdexcept>
#include <string>

namespace cghash {

/// Malformed input file (CSV, model, codes).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (bad dimensions, impossible K, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values encountered during optimization.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cghash
