#pragma once

#include <stdexcept>
#include <string>

namespace causalkit {

/// Bad input files, schemas, flags: the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Contract violations in data handed to an operation (wrong shapes,
/// invalid treatment values, empty arms, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: rank deficiency, degenerate variance, non-convergence
/// where the contract demands convergence.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace causalkit
