#include "climnorm/error.hpp"

namespace climnorm {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid_input";
        case ErrorCode::Decomposition: return "decomposition";
        case ErrorCode::RankDeficient: return "rank_deficient";
        case ErrorCode::Coverage: return "coverage";
        case ErrorCode::Alignment: return "alignment";
        case ErrorCode::Duplicate: return "duplicate";
        case ErrorCode::DegenerateVariance: return "degenerate_variance";
        case ErrorCode::EmptyBatch: return "empty_batch";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

DecompositionError::DecompositionError(std::size_t pivot, double value)
    : Error(ErrorCode::Decomposition,
            "matrix is not positive definite: Cholesky pivot " + std::to_string(pivot) +
                " is " + std::to_string(value)),
      pivot_(pivot) {}

void throw_invalid(const std::string& message) {
    throw Error(ErrorCode::InvalidInput, message);
}

}  // namespace climnorm
