#pragma once

#include <stdexcept>
#include <string>

namespace wfmgf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A value does not fit the chosen numeric representation.
class Overflow : public Error {
 public:
  using Error::Error;
};

/// A truncated series did not meet the requested tail tolerance.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double last_term)
      : Error(what), last_term_(last_term) {}
  double last_term() const noexcept { return last_term_; }

 private:
  double last_term_;
};

/// A numerical self-check (residual, semigroup, stochasticity) failed.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace wfmgf
