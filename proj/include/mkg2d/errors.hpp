#pragma once

#include <stdexcept>
#include <string>

namespace mkg2d {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: bad grid, illegal symbol/zero-mode combination,
/// malformed configuration file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands live on different grids, or a file does not match the run grid.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A ratio with a vanishing denominator was requested.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Regularity triple rejected by the admissibility predicate.
class AdmissibilityError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SnapshotError : public Error {
 public:
  using Error::Error;
};
class MagicMismatchError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};
class VersionMismatchError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};
class TruncatedFileError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};
class ChecksumError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

}  // namespace mkg2d
