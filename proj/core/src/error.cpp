#include "borelsum/error.hpp"

namespace borelsum {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::StripViolation: return "StripViolation";
    case ErrorCode::InversionFailure: return "InversionFailure";
    case ErrorCode::SingularInterval: return "SingularInterval";
    case ErrorCode::NonPositiveQ: return "NonPositiveQ";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::AbscissaViolation: return "AbscissaViolation";
    case ErrorCode::DegenerateWronskian: return "DegenerateWronskian";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::FitUnstable: return "FitUnstable";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace borelsum
