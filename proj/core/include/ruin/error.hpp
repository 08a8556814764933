#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ruin {

/// Failure categories raised by the engine. Each maps to a distinct CLI message.
enum class ErrorCode {
    InvalidArgument,
    DomainError,
    NetProfitViolation,
    ReductionError,
    RootCountMismatch,
    ConvergenceFailure,
    AmbiguousCluster,
    SingularSystem,
    ImagLeak,
    MultipleRootsUnsupported,
    NegativePi,
    RecurrenceBlowup,
    NearPole,
    UnsupportedKappa,
    NonConvergence,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ruin
