#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bms {

enum class ErrorCode {
  InvalidArgument,
  NonIncreasingThresholds,
  DegenerateType,
  NegativeDeductible,
  EmptyBand,
  ZeroPenalty,
  NotRegular,
  SingularSystem,
  NonFiniteIntegrand,
  QuadratureDivergence,
  NoMalusZone,
  NotInMalusZone,
  Assumption2Violation,
  AlphaOutOfRange,
  MonotonicityViolation,
  InfeasibleProportional,
  ManualDInconsistent,
  ScheduleInvalid,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every module reports failures through this exception; the CLI maps the
// code to a machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bms
