#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pack {

enum class ErrorCode {
  // Problem validation.
  NegativeWeight,
  FixedCenterNotCandidate,
  ThresholdRequiresDiscrete,
  CapacityWindowInverted,
  KTooSmall,
  InvalidProblem,
  // Evaluation.
  ShapeMismatch,
  MatrixIndexOutOfRange,
  // Allocation.
  QExceedsK,
  Infeasible,
  NoIncumbentWithinBudget,
  // Location.
  EmptyCluster,
  // Solver.
  NotEnoughDistinctSites,
  AllRestartsInfeasible,
  // Model selection / evaluation.
  NonpositiveVariance,
  LengthMismatch,
  // IO.
  ParseError,
  NegativeValue,
  RaggedMatrix,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure the library reports carries one of the codes above.  The
// message holds the human-readable detail (which bound failed, which line of
// which file, and so on).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pack
