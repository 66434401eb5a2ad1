#pragma once

#include <stdexcept>
#include <string>

namespace sandpile {

enum class Errc {
    ToppleStableSite,
    ArenaOverflow,
    NoTermination,
    EmptyConfiguration,
    MultipleHoles,
    StateLimitExceeded,
    SingularSystem,
    SchemaMismatch,
    NonMonotoneEdges,
    NonPositiveVariance,
    TooFewSamples,
    ExpectedTooSmall,
    MissingSamples,
    InvariantViolation,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ToppleStableSite:   return "TOPPLE_STABLE_SITE";
        case Errc::ArenaOverflow:      return "ARENA_OVERFLOW";
        case Errc::NoTermination:      return "NO_TERMINATION";
        case Errc::EmptyConfiguration: return "EMPTY_CONFIGURATION";
        case Errc::MultipleHoles:      return "MULTIPLE_HOLES";
        case Errc::StateLimitExceeded: return "STATE_LIMIT_EXCEEDED";
        case Errc::SingularSystem:     return "SINGULAR_SYSTEM";
        case Errc::SchemaMismatch:     return "SCHEMA_MISMATCH";
        case Errc::NonMonotoneEdges:   return "NON_MONOTONE_EDGES";
        case Errc::NonPositiveVariance: return "NON_POSITIVE_VARIANCE";
        case Errc::TooFewSamples:      return "TOO_FEW_SAMPLES";
        case Errc::ExpectedTooSmall:   return "EXPECTED_TOO_SMALL";
        case Errc::MissingSamples:     return "MISSING_SAMPLES";
        case Errc::InvariantViolation: return "INVARIANT_VIOLATION";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace sandpile
