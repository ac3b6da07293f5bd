#include "fpisvi/errors.hpp"

namespace fpisvi {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DegenerateRho: return "DegenerateRho";
    case ErrorKind::BoundaryMin: return "BoundaryMin";
    case ErrorKind::NonConvexStencil: return "NonConvexStencil";
    case ErrorKind::BoundaryIndex: return "BoundaryIndex";
    case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::InvalidTheta: return "InvalidTheta";
    case ErrorKind::NegativeSigmaSquared: return "NegativeSigmaSquared";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::InvalidSmile: return "InvalidSmile";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DuplicateAbscissa: return "DuplicateAbscissa";
    case ErrorKind::UnknownCase: return "UnknownCase";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidSmile:
    case ErrorKind::ParseError:
    case ErrorKind::TooFewPoints:
    case ErrorKind::DuplicateAbscissa:
    case ErrorKind::UnknownCase:
    case ErrorKind::IoError:
    case ErrorKind::DomainError:
    case ErrorKind::LengthMismatch:
    case ErrorKind::InvalidTheta:
    case ErrorKind::BoundaryIndex:
        return true;
    default:
        return false;
    }
}

} // namespace fpisvi
