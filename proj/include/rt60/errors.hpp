#pragma once

#include <stdexcept>
#include <string>

namespace rt60 {

// Process exit codes used by the CLI: 0 success, 2 argument error,
// 3 data error, 4 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed files, missing resources, unsatisfiable dataset sizing.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class RateError : public DataError {
 public:
  RateError(const std::string& msg, int found_rate_hz)
      : DataError(msg), found_rate(found_rate_hz) {}
  int found_rate;
};

class SizingError : public DataError {
 public:
  using DataError::DataError;
};

class LookupError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Inputs that are structurally valid but numerically unusable
// (constant spectrograms, non-decaying impulse responses, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInputError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoDecayError : public NumericError {
 public:
  using NumericError::NumericError;
};

// API misuse, e.g. backward before forward.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rt60
