#include "rpolar/error.hpp"

namespace rpolar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NonInvertibleOrReflective: return "NonInvertibleOrReflective";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotLambdaSquare: return "NotLambdaSquare";
    case ErrorCode::NotSymmetricSquare: return "NotSymmetricSquare";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InfeasibleLabel: return "InfeasibleLabel";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NonClassicalRange: return "NonClassicalRange";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace rpolar
