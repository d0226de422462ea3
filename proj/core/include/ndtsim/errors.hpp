#pragma once

#include <stdexcept>
#include <string>

namespace ndtsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. Carries the source line when the
/// problem comes from a scenario file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A computation diverged or its inputs make it meaningless.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteInput : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientSamples : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroStiffness : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverSingular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LimitUnreachable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Metrics requested for a run that never reached contact.
class NoContactPhase : public Error {
 public:
  using Error::Error;
};

/// Inspection request with an unusable pose.
class InvalidPose : public Error {
 public:
  using Error::Error;
};

}  // namespace ndtsim
