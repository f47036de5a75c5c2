#include "pdo/error.hpp"

namespace pdo {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::shape: return "shape";
    case ErrorKind::boundary: return "boundary";
    case ErrorKind::contract: return "contract";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::singular: return "singular-resolvent";
    case ErrorKind::contour: return "contour-violation";
    case ErrorKind::decay: return "decay-contract";
    case ErrorKind::positivity: return "positivity";
    case ErrorKind::accuracy: return "numerical-accuracy";
    case ErrorKind::not_elliptic: return "not-elliptic";
    case ErrorKind::instability: return "instability";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace pdo
