#pragma once

#include <stdexcept>
#include <string>

namespace sqzmode {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by a caller-supplied value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two fields or maps that must share a sampling grid do not.
class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numerical guard tripped (spectral aliasing, efficiency above unity).
class PhysicsGuardError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqzmode
