#pragma once

#include <stdexcept>
#include <string>

namespace sectorcert {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Vector or matrix dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A horizon is negative or exceeds the available signal length.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// A matrix argument violates a structural requirement (symmetry, finiteness).
class MatrixError : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Feedback or side tags of two quadratic specs do not match.
class ConventionError : public Error {
 public:
  using Error::Error;
};

/// A sector pair with M + N not negative definite was passed where a
/// compatible pair is required.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

/// zI - A is singular at the requested evaluation point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Floating-point overflow or an eigenvalue iteration that failed to converge.
class NumericsError : public Error {
 public:
  using Error::Error;
};

/// A frequency-domain check was requested for a system whose scaled
/// realization is not Schur stable.
class FrequencyDomainError : public Error {
 public:
  using Error::Error;
};

/// The per-step algebraic loop of an interconnection has no resolvable
/// solution (fixed-point iteration diverged or hit its iteration cap).
class WellPosednessError : public Error {
 public:
  using Error::Error;
};

/// A nonlinearity kind is not supported by the requested operation.
class KindError : public Error {
 public:
  using Error::Error;
};

/// All provided inputs are degenerate or otherwise unusable.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sectorcert
