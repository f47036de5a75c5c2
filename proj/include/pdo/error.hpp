#pragma once

#include <stdexcept>
#include <string>

namespace pdo {

enum class ErrorKind {
    config,       // invalid construction or scenario parameters
    shape,        // grid / truncation / backend mismatch
    boundary,     // finite-difference stencil does not fit the grid
    contract,     // a caller-side precondition that is not a plain parameter check
    domain,       // function undefined at a spectral point
    unsupported,  // operation not available on this backend
    singular,     // resolvent requested at a (numerically) singular point
    contour,      // spectrum too close to, or outside of, the integration contour
    decay,        // holomorphic function violates the decay contract
    positivity,   // symbol not positive definite where required
    accuracy,     // post-hoc validation of a computed symbol failed
    not_elliptic,
    instability,  // time integration blew up
    stiffness,    // adaptive step-size control gave up
    io,
};

const char* to_string(ErrorKind kind) noexcept;

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

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

} // namespace pdo
