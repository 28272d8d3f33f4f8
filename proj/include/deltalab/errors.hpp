#pragma once

#include <stdexcept>
#include <string>

namespace deltalab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid sizes, ranges or malformed inputs.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A potential (or density) reaches the boundary of the region it is used in.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// The boundary correction h_z cannot be solved: the one-parameter
/// boundary condition degenerates at this (z, b).
class SingularCorrectionError : public Error {
 public:
  using Error::Error;
};

/// A point-interaction coefficient c_z(alpha) or d_z(alpha) has a vanishing
/// denominator, i.e. -z is an eigenvalue of the limit operator.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// The attractive-coupling tuning finds no eigenvalue below zero.
class NoResonanceError : public Error {
 public:
  using Error::Error;
};

/// <v, phi> vanishes: the limit is the free operator, no alpha exists.
class OrthogonalResonanceError : public Error {
 public:
  using Error::Error;
};

/// z sits (numerically) on the spectrum of the operator being inverted.
class SpectralPointError : public Error {
 public:
  using Error::Error;
};

/// A density does not carry unit mass.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Log-log rate fit impossible (too few rows, nonpositive norms).
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace deltalab
