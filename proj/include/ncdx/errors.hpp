#pragma once

#include <stdexcept>
#include <string>

namespace ncdx {

// Error taxonomy. Schema errors come from malformed input documents; math
// errors are violated preconditions of otherwise well-formed jobs. The CLI
// maps them to distinct exit codes (2 and 3).
enum class Errc {
    ZeroDenominator,
    UnknownVariable,
    ContextMismatch,
    NotSquare,
    SingularMatrix,
    SingularSubmatrix,
    SingularLeadingCoefficient,
    NonPolynomialCoefficients,
    DegenerateKernel,
    InternalMismatch,
    NonzeroRemainder,
    IrrationalSpectrum,
    NotAnEigenvalue,
    KernelMismatch,
    SchemaError,
    Overflow,
};

inline const char *errc_name(Errc c) {
    switch (c) {
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::ContextMismatch: return "ContextMismatch";
    case Errc::NotSquare: return "NotSquare";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::SingularSubmatrix: return "SingularSubmatrix";
    case Errc::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case Errc::NonPolynomialCoefficients: return "NonPolynomialCoefficients";
    case Errc::DegenerateKernel: return "DegenerateKernel";
    case Errc::InternalMismatch: return "InternalMismatch";
    case Errc::NonzeroRemainder: return "NonzeroRemainder";
    case Errc::IrrationalSpectrum: return "IrrationalSpectrum";
    case Errc::NotAnEigenvalue: return "NotAnEigenvalue";
    case Errc::KernelMismatch: return "KernelMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::Overflow: return "Overflow";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string &msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

    // Input problems are the caller's fault; everything else is a violated
    // mathematical precondition of a well-formed job.
    bool is_schema() const { return code_ == Errc::SchemaError; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &msg) { throw Error(code, msg); }

} // namespace ncdx
