#pragma once

#include <stdexcept>
#include <string>

namespace symflow {

enum class ErrorKind {
  InvalidGamma,
  UnbalancedEigenspaces,
  NotLagrangian,
  NotUnitary,
  NotHermitian,
  ToleranceAmbiguity,
  NotCoisotropic,
  DimensionMismatch,
  RefinementExhausted,
  MethodDisagreement,
  NonIntegerResult,
  IdentityViolation,
  AnticommutationFailure,
  AsymmetricSpectrum,
  BracketingFailure,
  IncompatibleBoundary,
  ConvergenceTooSlow,
  ResonanceViolation,
  GluingViolation,
  WindowEscape,
  SchemaError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::UnbalancedEigenspaces: return "UnbalancedEigenspaces";
    case ErrorKind::NotLagrangian: return "NotLagrangian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ToleranceAmbiguity: return "ToleranceAmbiguity";
    case ErrorKind::NotCoisotropic: return "NotCoisotropic";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RefinementExhausted: return "RefinementExhausted";
    case ErrorKind::MethodDisagreement: return "MethodDisagreement";
    case ErrorKind::NonIntegerResult: return "NonIntegerResult";
    case ErrorKind::IdentityViolation: return "IdentityViolation";
    case ErrorKind::AnticommutationFailure: return "AnticommutationFailure";
    case ErrorKind::AsymmetricSpectrum: return "AsymmetricSpectrum";
    case ErrorKind::BracketingFailure: return "BracketingFailure";
    case ErrorKind::IncompatibleBoundary: return "IncompatibleBoundary";
    case ErrorKind::ConvergenceTooSlow: return "ConvergenceTooSlow";
    case ErrorKind::ResonanceViolation: return "ResonanceViolation";
    case ErrorKind::GluingViolation: return "GluingViolation";
    case ErrorKind::WindowEscape: return "WindowEscape";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Numerical-resolution failures map to a distinct CLI exit code.
inline bool is_resolution_failure(ErrorKind k) {
  return k == ErrorKind::RefinementExhausted || k == ErrorKind::ConvergenceTooSlow;
}

}  // namespace symflow
