#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace borelsum {

enum class ErrorCode {
  PoleProximity,
  StripViolation,
  InversionFailure,
  SingularInterval,
  NonPositiveQ,
  GridTooCoarse,
  DegenerateState,
  DomainEscape,
  NoContraction,
  MaxIterExceeded,
  AbscissaViolation,
  DegenerateWronskian,
  BranchCut,
  FitUnstable,
  StepUnderflow,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable failure category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace borelsum
