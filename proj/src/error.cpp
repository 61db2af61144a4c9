#include "bldc/error.hpp"

namespace bldc {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedConversion: return "UnsupportedConversion";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MismatchedFrames: return "MismatchedFrames";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MissingRequiredField: return "MissingRequiredField";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::UnconvertibleKtConvention: return "UnconvertibleKtConvention";
    case ErrorCode::WindingRequired: return "WindingRequired";
    case ErrorCode::ConflictingSources: return "ConflictingSources";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::UnbalancedInput: return "UnbalancedInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace bldc
