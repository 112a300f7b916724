#pragma once

#include <stdexcept>
#include <string>

namespace surfglm {

/// Error categories map onto the CLI exit codes: config errors exit 2,
/// data errors exit 3, numerical failures exit 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace surfglm
