#pragma once

#include <stdexcept>
#include <string>

namespace pedagogue {

// Error taxonomy for the whole library. The CLI maps DataError to exit
// code 3 and NumericError to exit code 4; config problems are handled by
// the CLI itself (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedCsv : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatch : public DataError {
 public:
  using DataError::DataError;
};

class EmptySample : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientSamples : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientPool : public DataError {
 public:
  using DataError::DataError;
};

class MissingCornerVowel : public DataError {
 public:
  using DataError::DataError;
};

class SingleClassTraining : public DataError {
 public:
  using DataError::DataError;
};

class SubsetLimitExceeded : public DataError {
 public:
  using DataError::DataError;
};

class ZeroVariance : public DataError {
 public:
  using DataError::DataError;
};

class NonPositiveDefiniteCovariance : public NumericError {
 public:
  using NumericError::NumericError;
};

class TuningFailed : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateComponent : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace pedagogue
