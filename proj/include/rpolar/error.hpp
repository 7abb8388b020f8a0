#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpolar {

enum class ErrorCode {
  DimensionMismatch,
  NonFinite,
  NotRotation,
  NotOrthogonal,
  NonInvertibleOrReflective,
  Degenerate,
  NotSkew,
  NotLambdaSquare,
  NotSymmetricSquare,
  InvalidWeights,
  InvalidParams,
  InfeasibleLabel,
  TooLarge,
  NonClassicalRange,
  DegenerateD,
  StepTooLarge,
  Parse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpolar
