#pragma once

#include <stdexcept>
#include <string>

namespace ambistop {

enum class ErrorCode {
    NonPositiveSigma,
    NonPositiveRate,
    NegativeKappa,
    DegenerateRho,
    ComplexRoots,
    PoleInB,
    NoConvergence,
    DomainError,
    Overflow,
    BracketFailure,
    NonPositiveStrike,
    UnexpectedRegime,
    NotAnEquilibrium,
    NoSignChange,
    EmptyGrid,
    BadGrid,
    MismatchedModel,
    InvalidInitialState,
    StepTooLarge,
    StartInStopRegion,
    UpperBoundaryPrecondition,
    ConfigError,
};

const char* error_code_name(ErrorCode code);

// Process exit status used by the CLI for each error kind.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ambistop
