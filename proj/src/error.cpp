#include "ambistop/error.hpp"

namespace ambistop {

const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NegativeKappa: return "NegativeKappa";
    case ErrorCode::DegenerateRho: return "DegenerateRho";
    case ErrorCode::ComplexRoots: return "ComplexRoots";
    case ErrorCode::PoleInB: return "PoleInB";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NonPositiveStrike: return "NonPositiveStrike";
    case ErrorCode::UnexpectedRegime: return "UnexpectedRegime";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::MismatchedModel: return "MismatchedModel";
    case ErrorCode::InvalidInitialState: return "InvalidInitialState";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::StartInStopRegion: return "StartInStopRegion";
    case ErrorCode::UpperBoundaryPrecondition: return "UpperBoundaryPrecondition";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

int error_exit_code(ErrorCode code)
{
    // 0 is success, 1 is reserved for unexpected failures.
    return 10 + static_cast<int>(code);
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace ambistop
