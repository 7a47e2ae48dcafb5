#pragma once

#include <stdexcept>
#include <string>

namespace uip {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  NonFiniteResult,
  SingularDenominator,
  DimensionMismatch,
  InvalidParameter,
  InvalidTime,
  BudgetExceeded,
  OverflowGuard,
  Config,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uip
