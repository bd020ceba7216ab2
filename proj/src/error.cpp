#include "pack/error.hpp"

namespace pack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::FixedCenterNotCandidate: return "FixedCenterNotCandidate";
    case ErrorCode::ThresholdRequiresDiscrete: return "ThresholdRequiresDiscrete";
    case ErrorCode::CapacityWindowInverted: return "CapacityWindowInverted";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MatrixIndexOutOfRange: return "MatrixIndexOutOfRange";
    case ErrorCode::QExceedsK: return "QExceedsK";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoIncumbentWithinBudget: return "NoIncumbentWithinBudget";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::NotEnoughDistinctSites: return "NotEnoughDistinctSites";
    case ErrorCode::AllRestartsInfeasible: return "AllRestartsInfeasible";
    case ErrorCode::NonpositiveVariance: return "NonpositiveVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::RaggedMatrix: return "RaggedMatrix";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pack
