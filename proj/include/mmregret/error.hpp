#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmr {

enum class ErrorCode {
  NegativeBound,
  AllZeroBounds,
  NonFinite,
  EmptyMatrix,
  ProfileOutOfBounds,
  ShapeMismatch,
  NonPositiveScale,
  NotSingleBidder,
  MechanismShapeMismatch,
  OutOfRange,
  DimensionTooLarge,
  TooFewCells,
  NumericalFailure,
  SymmetryRequired,
  ParseError,
  InfeasibleOutcome,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the message is prefixed with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmr
