#pragma once

#include <cstdint>
#include <optional>

#include "pdo/symbol.hpp"

namespace pdo {

// A(x, pi) = (a + a^*) / 2. For x-dependent abelian symbols a^* is the
// two-term adjoint expansion, followed by a pointwise hermitian part.
Symbol real_part_symbol(const Symbol& a);

struct LowerBoundResult {
    bool holds = false;
    double margin = 0.0;  // min eigenvalue of A - C0 pi(M)^m over the grid
    std::size_t worst_point = 0;
    std::size_t worst_x = 0;
};

LowerBoundResult lower_bound_check(const Symbol& a, double m, double C0);

struct GardingReport {
    double C0 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double margin = 0.0;
    bool certified = false;
    bool roundoff_flag = false;  // margin in [-tolerance, 0)
    std::size_t witness = 0;     // trial index attaining the margin
    int trials = 0;
    std::uint64_t seed = 0;
    bool q_is_zero = false;      // A - C1 pi(M)^m vanished identically
    double remainder_sup = 0.0;  // max |q q^* - (A - C1 pi(M)^m)|
    std::optional<double> remainder_order;  // fitted growth exponent of r
    double expected_remainder_order = 0.0;  // m - (rho - delta)
};

inline constexpr double garding_tolerance = 1e-9;

// Certifies Re(Op(a)u, u) >= C1 ||u||^2_{m/2} - C2 ||u||^2 on `trials`
// seeded random test functions with spectral decay (1 + nu)^-2.
GardingReport garding_certify(const Symbol& a, double m, double C0, double C1, int trials = 200,
                              std::uint64_t seed = 20240601);

// Smallest C with (1+nu)^{2t/nu} <= eps (1+nu)^{2s/nu} + C at every grid
// eigenvalue, evaluated in floating point so the per-mode bound holds exactly.
double interpolation_constant(const GroupBackend& backend, double s, double t, double eps);

// Invariant symbol with a random hermitian block of operator norm 1 at
// every point (seeded).
Symbol random_hermitian_symbol(const BackendPtr& backend, std::uint64_t seed);

} // namespace pdo
