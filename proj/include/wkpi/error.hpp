#pragma once

#include <stdexcept>
#include <string>

namespace wkpi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Arguments that violate a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A class whose total WKPI cost to the rest of the data is zero, so the
/// normalized cost matrices cannot be formed.
class DegenerateClassError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (non-finite cost, badly negative radicand, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace wkpi
