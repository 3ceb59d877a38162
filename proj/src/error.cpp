#include "qrabi/error.hpp"

namespace qrabi {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::Composition: return "composition";
    case ErrorKind::TruncationInsufficient: return "truncation-insufficient";
    case ErrorKind::ZeroNorm: return "zero-norm";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::InvalidParams: return "invalid-params";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::SymmetryViolation: return "symmetry-violation";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace qrabi
