#pragma once

#include <stdexcept>
#include <string>

namespace gif {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or out-of-range construction parameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (dimension mismatch, non-finite input, z <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Density evaluated at a point where it diverges.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Numerical failure: root not converged, factorization failed, singular innovation covariance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Non-finite state produced by a dynamics model.
class PropagationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// All posterior weights underflowed.
class DegeneratePosteriorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Interpolant evaluated outside the span of its data.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

// Target grid reaches outside the source grid it is evaluated from.
class NestingError : public ExtrapolationError {
 public:
  using ExtrapolationError::ExtrapolationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Formats a double with 17 significant digits (round-trippable).
std::string format_double(double value);

}  // namespace gif
