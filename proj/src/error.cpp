#include "rmtd/error.hpp"

namespace rmtd {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::BlochOutOfBall: return "BlochOutOfBall";
        case ErrorKind::NonPureInitial: return "NonPureInitial";
        case ErrorKind::NotAState: return "NotAState";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::GridTooShort: return "GridTooShort";
        case ErrorKind::NegativeTime: return "NegativeTime";
        case ErrorKind::UnsupportedEnsemble: return "UnsupportedEnsemble";
        case ErrorKind::UnknownCase: return "UnknownCase";
        case ErrorKind::MissingFitParameter: return "MissingFitParameter";
        case ErrorKind::FitDiverged: return "FitDiverged";
        case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace rmtd
