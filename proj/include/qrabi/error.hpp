#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrabi {

enum class ErrorKind {
    InvalidDimension,
    Composition,
    TruncationInsufficient,
    ZeroNorm,
    Shape,
    DimensionMismatch,
    InvalidState,
    InvalidParams,
    Configuration,
    Stiffness,
    OutOfDomain,
    SymmetryViolation,
    Solver,
    Domain,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so that callers (the CLI
// in particular) can map it onto exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace qrabi
