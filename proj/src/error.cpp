#include "mmregret/error.hpp"

namespace mmr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeBound: return "NegativeBound";
    case ErrorCode::AllZeroBounds: return "AllZeroBounds";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ProfileOutOfBounds: return "ProfileOutOfBounds";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::NotSingleBidder: return "NotSingleBidder";
    case ErrorCode::MechanismShapeMismatch: return "MechanismShapeMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::TooFewCells: return "TooFewCells";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SymmetryRequired: return "SymmetryRequired";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InfeasibleOutcome: return "InfeasibleOutcome";
  }
  return "Unknown";
}

}  // namespace mmr
