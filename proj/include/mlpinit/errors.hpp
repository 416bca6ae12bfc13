#pragma once

#include <stdexcept>
#include <string>

namespace mlpinit {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Structurally malformed input (wrong column count, truncated file, bad magic).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A single field could not be interpreted.
class ParseError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

// Input data cannot be used for an experiment (unreadable file, unusable split).
class DataError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergedTrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlpinit
