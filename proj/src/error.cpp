#include "ddestab/error.hpp"

namespace ddestab {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension error";
        case ErrorKind::SingularLead: return "singular-lead error";
        case ErrorKind::TooFewPoints: return "too-few-points error";
        case ErrorKind::StepResolution: return "step-resolution error";
        case ErrorKind::WindowTooShort: return "window-too-short error";
        case ErrorKind::SingularSystem: return "singular-system error";
        case ErrorKind::HypothesisViolation: return "hypothesis-violation error";
        case ErrorKind::WrongCase: return "wrong-case error";
        case ErrorKind::UnboundedProgram: return "unbounded-program error";
        case ErrorKind::Symmetry: return "symmetry error";
        case ErrorKind::LemmaViolation: return "lemma-violation error";
        case ErrorKind::StepSingular: return "step-singular error";
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::Config: return "config error";
    }
    return "error";
}

}  // namespace ddestab
