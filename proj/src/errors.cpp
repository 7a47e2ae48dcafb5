#include "uip/errors.hpp"

namespace uip {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidTime: return "InvalidTime";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::Config: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace uip
