#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epidss {

enum class ErrorCode {
    InvalidArgument,
    InvalidNetwork,
    UnknownVariable,
    UnknownState,
    ContradictoryEvidence,
    UnreachableEvidence,
    StepTooLarge,
    NotFound,
    Conflict,
    Io,
    Parse,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::InvalidNetwork: return "invalid_network";
        case ErrorCode::UnknownVariable: return "unknown_variable";
        case ErrorCode::UnknownState: return "unknown_state";
        case ErrorCode::ContradictoryEvidence: return "contradictory_evidence";
        case ErrorCode::UnreachableEvidence: return "unreachable_evidence";
        case ErrorCode::StepTooLarge: return "step_too_large";
        case ErrorCode::NotFound: return "not_found";
        case ErrorCode::Conflict: return "conflict";
        case ErrorCode::Io: return "io";
        case ErrorCode::Parse: return "parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define EPIDSS_REQUIRE(cond, code, msg)              \
    do {                                             \
        if (!(cond)) throw ::epidss::Error((code), (msg)); \
    } while (0)

} // namespace epidss
