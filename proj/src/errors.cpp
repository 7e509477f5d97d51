#include "bms/errors.hpp"

namespace bms {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonIncreasingThresholds: return "NonIncreasingThresholds";
    case ErrorCode::DegenerateType: return "DegenerateType";
    case ErrorCode::NegativeDeductible: return "NegativeDeductible";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::ZeroPenalty: return "ZeroPenalty";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorCode::NoMalusZone: return "NoMalusZone";
    case ErrorCode::NotInMalusZone: return "NotInMalusZone";
    case ErrorCode::Assumption2Violation: return "Assumption2Violation";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::InfeasibleProportional: return "InfeasibleProportional";
    case ErrorCode::ManualDInconsistent: return "ManualDInconsistent";
    case ErrorCode::ScheduleInvalid: return "ScheduleInvalid";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace bms
