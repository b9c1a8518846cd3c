#pragma once

#include <stdexcept>
#include <string>

namespace splatseg {

// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind {
  usage,      // bad arguments or mismatched shapes supplied by the caller
  data,       // unreadable or degenerate input data
  numerical,  // a quantity that cannot be computed (singular, NaN, 0/0)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class ShapeMismatchError : public UsageError {
 public:
  explicit ShapeMismatchError(const std::string& what) : UsageError(what) {}
};

// PGM decoding failures, one type per failure mode.
class PgmHeaderError : public DataError {
 public:
  explicit PgmHeaderError(const std::string& what) : DataError(what) {}
};

class PgmTruncatedError : public DataError {
 public:
  explicit PgmTruncatedError(const std::string& what) : DataError(what) {}
};

class PgmMagicError : public DataError {
 public:
  explicit PgmMagicError(const std::string& what) : DataError(what) {}
};

class DegenerateScaleError : public NumericalError {
 public:
  explicit DegenerateScaleError(const std::string& what) : NumericalError(what) {}
};

// A mask with only one class has no boundary, so T(x) is undefined.
class UndefinedBoundaryError : public DataError {
 public:
  explicit UndefinedBoundaryError(const std::string& what) : DataError(what) {}
};

class UndefinedMetricError : public NumericalError {
 public:
  explicit UndefinedMetricError(const std::string& what) : NumericalError(what) {}
};

class PoisonedGradientError : public NumericalError {
 public:
  explicit PoisonedGradientError(const std::string& what) : NumericalError(what) {}
};

class DegenerateShapeError : public DataError {
 public:
  explicit DegenerateShapeError(const std::string& what) : DataError(what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace splatseg
