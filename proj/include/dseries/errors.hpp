#pragma once

#include <stdexcept>
#include <string>

namespace dseries {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad parameters, wrong pairing).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A request needs more working precision than the configured maximum.
class PrecisionCapError : public Error {
 public:
  using Error::Error;
};

/// A term count or magnitude is outside the configured or representable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace dseries
