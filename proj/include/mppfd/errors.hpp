#pragma once

#include <stdexcept>
#include <string>

namespace mppfd {

/// Invalid user input: bad grid extents, unknown case names, rejected config keys.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The solver produced a state it must not produce (non-finite values,
/// a limited update outside the admissible range).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mppfd
