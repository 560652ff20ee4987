#pragma once

#include <stdexcept>
#include <string>

namespace steklov {

// Every failure raised by the library derives from Error, so callers that
// only care about "something went wrong" can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Annulus parameters violate 0 < r1 < r2, 0 <= t < r2 - r1.
class InvalidAnnulus : public Error {
 public:
  using Error::Error;
};

// Malformed option outside the geometric input (bad n, tolerance, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Bipolar frame requested for a concentric annulus (alpha diverges).
class DegenerateFrame : public Error {
 public:
  using Error::Error;
};

// Sturm bisection or inverse iteration ran out of budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// Truncation doubling hit n_max before the stopping criterion held.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public Error {
 public:
  using Error::Error;
};

class QuadratureStall : public Error {
 public:
  using Error::Error;
};

class ZeroFunction : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

// A continued-fraction denominator collapsed; sigma is far from the spectrum.
class DivisionNearZero : public Error {
 public:
  using Error::Error;
};

class NoRootInBracket : public Error {
 public:
  using Error::Error;
};

}  // namespace steklov
