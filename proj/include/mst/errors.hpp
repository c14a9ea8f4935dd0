#pragma once

#include <stdexcept>
#include <string>

namespace mst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file header or structure.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Array element type other than the one expected.
class DtypeError : public Error {
 public:
  using Error::Error;
};

/// Well-formed file whose payload is unusable (non-finite values).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar argument (K = 0, alpha outside [0,1], ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Content and style tensors disagree on channel count.
class ChannelMismatchError : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

/// More clusters requested than there are style feature vectors.
class TooFewPointsError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Position lists do not partition the grid.
class PartitionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search requested on an instance beyond the enumeration limit.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

}  // namespace mst
