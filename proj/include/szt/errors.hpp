#pragma once

#include <stdexcept>
#include <string>

namespace szt {

// Exit-code classes: UsageError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class EdfError : public DataError {
 public:
  using DataError::DataError;
};

class MissingChannelError : public DataError {
 public:
  explicit MissingChannelError(const std::string& label)
      : DataError("missing channel: " + label), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class ManifestError : public DataError {
 public:
  using DataError::DataError;
};

class CacheVersionError : public DataError {
 public:
  using DataError::DataError;
};

class CacheTruncatedError : public DataError {
 public:
  using DataError::DataError;
};

class SpecMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class FoldError : public DataError {
 public:
  using DataError::DataError;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double off_diagonal_norm)
      : NumericError(what), off_norm_(off_diagonal_norm) {}
  double off_diagonal_norm() const noexcept { return off_norm_; }

 private:
  double off_norm_;
};

class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, int epoch) : NumericError(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace szt
