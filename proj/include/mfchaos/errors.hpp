#pragma once

#include <stdexcept>
#include <string>

namespace mfchaos {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No sign change found after geometric bracket expansion; the driver
/// violates monotonicity or coercivity in its volatility argument.
struct BracketFailure : Error {
  using Error::Error;
};

/// Root iteration budget exhausted before reaching the residual tolerance.
struct NonConvergence : Error {
  using Error::Error;
};

/// Inferred driver bounds are not strictly positive.
struct DegenerateDriver : Error {
  using Error::Error;
};

/// Kernel width fell below the grid resolution guard (epsilon < 2*dx).
struct UnderResolvedKernel : Error {
  using Error::Error;
};

/// Time step does not satisfy the explicit stability bound.
struct CflViolation : Error {
  using Error::Error;
};

struct BlowUp : Error {
  double time = 0.0;
  BlowUp(const std::string& msg, double t) : Error(msg), time(t) {}
};

struct EmptyInput : Error {
  using Error::Error;
};

struct NonPositiveEnergy : Error {
  using Error::Error;
};

struct WindowEmpty : Error {
  using Error::Error;
};

/// Config file is syntactically malformed.
struct ParseError : Error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int l, int c) : Error(msg), line(l), column(c) {}
};

/// A parameter violates its constraint; `key_path` names the offending key.
struct ValidationError : Error {
  std::string key_path;
  ValidationError(std::string key, const std::string& constraint)
      : Error(key + ": " + constraint), key_path(std::move(key)) {}
};

}  // namespace mfchaos
