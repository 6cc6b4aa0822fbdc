#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lfmd {

enum class ErrorCode {
  DomainError,
  DimensionMismatch,
  UnsupportedGeometry,
  NumericalOverflow,
  ZeroGradient,
  NonMonotonicCall,
  Unset,
  InvalidM,
  EmptyAverage,
  ConfigError,
  DegenerateFit,
  MissingOptimum,
  OracleUnavailable,
  NeedsExplicitR,
  BoundUndefined,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on the class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::NumericalOverflow: return "NumericalOverflow";
    case ErrorCode::ZeroGradient: return "ZeroGradient";
    case ErrorCode::NonMonotonicCall: return "NonMonotonicCall";
    case ErrorCode::Unset: return "Unset";
    case ErrorCode::InvalidM: return "InvalidM";
    case ErrorCode::EmptyAverage: return "EmptyAverage";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::MissingOptimum: return "MissingOptimum";
    case ErrorCode::OracleUnavailable: return "OracleUnavailable";
    case ErrorCode::NeedsExplicitR: return "NeedsExplicitR";
    case ErrorCode::BoundUndefined: return "BoundUndefined";
  }
  return "Unknown";
}

}  // namespace lfmd
