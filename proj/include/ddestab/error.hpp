#pragma once

#include <stdexcept>
#include <string>

namespace ddestab {

enum class ErrorKind {
    Dimension,
    SingularLead,
    TooFewPoints,
    StepResolution,
    WindowTooShort,
    SingularSystem,
    HypothesisViolation,
    WrongCase,
    UnboundedProgram,
    Symmetry,
    LemmaViolation,
    StepSingular,
    InvalidArgument,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. Every failure carries a kind so callers (the CLI
/// in particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thrown when D - dt*B(theta) (or a per-step simulation matrix) cannot be
/// inverted. Carries the smallest singular value that triggered it.
class SingularError : public Error {
public:
    SingularError(ErrorKind kind, const std::string& what, double smallest_sv)
        : Error(kind, what + " (smallest singular value " + std::to_string(smallest_sv) + ")"),
          smallest_sv_(smallest_sv) {}

    double smallest_singular_value() const noexcept { return smallest_sv_; }

private:
    double smallest_sv_;
};

}  // namespace ddestab
