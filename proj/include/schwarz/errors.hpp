#pragma once

#include <stdexcept>
#include <string>

namespace schwarz {

// Base class for every error raised by the library. The CLI maps
// UsageError subclasses to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something outside an operation's domain.
class UsageError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidArgument : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidExponent : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidRadius : public UsageError {
 public:
  using UsageError::UsageError;
};

class OutOfBall : public UsageError {
 public:
  using UsageError::UsageError;
};

class UnsupportedDimension : public UsageError {
 public:
  using UsageError::UsageError;
};

// r >= 0.999 with the default node budget.
class NearBoundary : public UsageError {
 public:
  using UsageError::UsageError;
};

class NonFiniteIntegrand : public Error {
 public:
  NonFiniteIntegrand(double t, const std::string& what)
      : Error(what), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

class BracketFailure : public Error {
 public:
  using Error::Error;
};

// A computed quantity broke an invariant it must satisfy (e.g. a sharpness
// ratio above 1, a non-monotone bound curve).
class Inconsistency : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace schwarz
