#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace climnorm {

enum class ErrorCode {
    InvalidInput,
    Decomposition,
    RankDeficient,
    Coverage,
    Alignment,
    Duplicate,
    DegenerateVariance,
    EmptyBatch,
    Io,
};

/// Short machine-readable token for an error code, e.g. "rank_deficient".
std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The CLI prints
/// `error: <code>: <message>` on a single line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Cholesky breakdown; carries the zero-based pivot that failed.
class DecompositionError : public Error {
public:
    DecompositionError(std::size_t pivot, double value);
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Raised when a series does not cover the window a computation needs.
class CoverageError : public Error {
public:
    CoverageError(const std::string& message, std::size_t first_estimable)
        : Error(ErrorCode::Coverage, message), first_estimable_(first_estimable) {}
    std::size_t first_estimable() const noexcept { return first_estimable_; }

private:
    std::size_t first_estimable_;
};

[[noreturn]] void throw_invalid(const std::string& message);

}  // namespace climnorm
