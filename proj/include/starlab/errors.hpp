#pragma once

#include <stdexcept>
#include <string>

namespace starlab {

/// Arguments violate an operation's preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is valid but too large for an exact (enumerating) routine.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A persisted record could not be read back.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace starlab
