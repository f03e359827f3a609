#pragma once

#include <stdexcept>
#include <string>

namespace solab {

/// Violated precondition of a library call (dimension mismatch, bad index).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid user-supplied configuration (module size, empty pattern set, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A statistical fit that cannot be formed from the data it was given.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace solab
