#pragma once

#include <stdexcept>
#include <string>

namespace eqt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or parameter field is out of its valid domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The request exceeds what the simulated apparatus can deliver (e.g. Rabi bound).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// An estimate is undefined (empty ensemble, zero weights, undefined direction).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Pulse synthesis did not meet its contract within the search budget.
class SynthesisError : public Error {
 public:
  SynthesisError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Configuration document or window layout is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace eqt
