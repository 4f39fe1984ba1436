#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wdecor {

enum class ErrorCode {
  SingularDesign,
  DimensionMismatch,
  StaleWhitening,
  NonFiniteInput,
  NonFiniteOutput,
  NotOrthogonal,
  NonPositiveVariance,
  Unsupported,
  SeriesTooShort,
  ZeroDirection,
  EmptyInput,
  TooFewSamples,
  DegenerateSample,
  NotABanditProcess,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the Monte Carlo harness, the CLI) can branch on the kind.
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
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StaleWhitening: return "StaleWhitening";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonFiniteOutput: return "NonFiniteOutput";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::NotABanditProcess: return "NotABanditProcess";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace wdecor
