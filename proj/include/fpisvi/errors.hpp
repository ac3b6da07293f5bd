#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpisvi {

enum class ErrorKind {
    DegenerateRho,
    BoundaryMin,
    NonConvexStencil,
    BoundaryIndex,
    NonPositiveSigma,
    SingularSystem,
    DomainError,
    LengthMismatch,
    NotAFunction,
    InvalidTheta,
    NegativeSigmaSquared,
    BracketFailure,
    InvalidSmile,
    ParseError,
    TooFewPoints,
    DuplicateAbscissa,
    UnknownCase,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Errors caused by bad input (files, flags, smiles) as opposed to a numerical
/// breakdown inside a solver. The CLI maps the two groups to different exit codes.
bool is_input_error(ErrorKind kind) noexcept;

class SviError : public std::runtime_error {
public:
    SviError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace fpisvi
