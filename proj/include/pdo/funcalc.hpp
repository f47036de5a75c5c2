#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

// One quadrature-discretized piece of the contour. weights already include
// the Jacobian dz/dt and the orientation, so sum_j w_j g(z_j) ~ int g dz.
struct ContourSegment {
    std::string kind;  // "ray" or "arc"
    std::vector<cplx> nodes;
    std::vector<cplx> weights;
};

// Boundary of Lambda_eps = {|z| <= eps} u {|arg z| >= pi - theta}, cut off
// at |z| = r_max and closed by the outer arc. Positively oriented around
// the enclosed region, which is where the spectrum has to live.
struct Contour {
    double epsilon = 0.5;
    double theta = 0.35;
    double r_max = 1e4;
    int n_nodes = 200;
    std::vector<ContourSegment> segments;

    Contour reversed() const;
    std::size_t size() const;
    // True when z lies strictly inside the region bounded by the contour.
    bool encloses(cplx z) const;
    double distance(cplx z) const;
};

Contour keyhole_contour(double epsilon = 0.5, double theta = 0.35, double r_max = 1e4, int n_nodes = 200);

// Holomorphic scalar function on C \ R_- together with its decay exponent:
// |F(z)| <= C |z|^decay.
struct HolomorphicFunction {
    std::string name;
    std::function<cplx(cplx)> f;
    double decay = -1.0;
};

HolomorphicFunction inverse_function();                // z^-1
HolomorphicFunction inverse_sqrt_function();           // z^-1/2
HolomorphicFunction power_function(cplx s);            // z^s, principal branch
HolomorphicFunction exp_neg_inverse_function();        // e^-z z^-1
// Registry lookup used by the scenario runner: inv, inv_sqrt, power, exp_neg_inv.
HolomorphicFunction holomorphic_from_name(const std::string& name, double parameter = 0.0);

// -(1/2 pi i) sum_j w_j F(z_j) (a - z_j)^-1 for a single matrix.
CMatrix dunford_riesz(const CMatrix& a, const HolomorphicFunction& F, const Contour& contour);
// Same at every (x, point) of a symbol; declared order becomes m * decay.
Symbol dunford_riesz(const Symbol& a, const HolomorphicFunction& F, const Contour& contour);

// U F(D) U^* from the eigendecomposition of a hermitian matrix.
CMatrix matfun_oracle(const CMatrix& m, const std::function<cplx(double)>& F);

// Keyhole sized to the spectrum: eps = min(0.5, lmin / 2), r_max = max(1e4, 10 lmax).
Contour spectrum_contour(double lambda_min, double lambda_max);

// a^s for a hermitian positive definite symbol.
Symbol complex_power(const Symbol& a, cplx s, const std::optional<Contour>& contour = std::nullopt);
// a^{1/2}, validated by squaring back.
Symbol sqrt_symbol(const Symbol& a);

inline constexpr double positivity_threshold = 1e-12;

} // namespace pdo
