#pragma once

#include <stdexcept>
#include <string>

namespace c2gan {

/// Bad argument to an operation (shape mismatch, invalid radius, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration: channel counts, unknown keys, missing oracle.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or parsed. The message names the file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A loss term became NaN or infinite during training.
struct NonFiniteLossError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace c2gan
