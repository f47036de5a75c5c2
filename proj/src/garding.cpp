#include "pdo/garding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pdo/elliptic.hpp"
#include "pdo/error.hpp"
#include "pdo/funcalc.hpp"
#include "pdo/parallel.hpp"

namespace pdo {

namespace {

double smallest_eigenvalue(const CMatrix& h) {
    if (h.size() == 1) return h(0, 0).real();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Symbol hermitian_part(const Symbol& a) {
    Symbol out = a;
    for (std::size_t p = 0; p < a.num_points(); ++p)
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            const CMatrix blk = a.block(ix, p);
            out.block(ix, p) = 0.5 * (blk + blk.adjoint());
        }
    return out;
}

// Growth exponent of max_x |r(x, xi)| against <xi> over the outer half of the
// interior grid; empty when r is numerically zero there.
std::optional<double> remainder_growth(const Symbol& r) {
    const auto& backend = *r.backend();
    std::vector<double> xs, ys;
    double top = 0.0;
    for (std::size_t p = 0; p < r.num_points(); ++p) {
        if (!r.in_interior(p)) continue;
        double v = 0.0;
        for (std::size_t ix = 0; ix < r.x_slices(); ++ix) v = std::max(v, r.block(ix, p).norm());
        const double scale = std::sqrt(1.0 + backend.spectrum(p)[0]);
        top = std::max(top, scale);
        xs.push_back(scale);
        ys.push_back(v);
    }
    std::vector<double> fx, fy;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (xs[k] >= 0.5 * top && ys[k] > 1e-13) {
            fx.push_back(xs[k]);
            fy.push_back(ys[k]);
        }
    if (fx.size() < 2) return std::nullopt;
    double lo = fx.front(), hi = fx.front();
    for (double x : fx) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi / lo < 1.01) return std::nullopt;
    return loglog_slope(fx, fy);
}

struct TrialValue {
    double quad = 0.0;  // Re(Op(a)u, u) - C1 ||u||^2_{m/2}
    double l2 = 0.0;
};

} // namespace

Symbol real_part_symbol(const Symbol& a) {
    Symbol star = a.is_invariant() ? pointwise_adjoint(a) : adjoint_symbol(a, 2);
    Symbol out = hermitian_part(0.5 * (a + star));
    out.set_order(a.order());
    return out;
}

LowerBoundResult lower_bound_check(const Symbol& a, double m, double C0) {
    require(m > 0 && C0 > 0, ErrorKind::config, "lower_bound_check needs m > 0 and C0 > 0");
    const Symbol A = real_part_symbol(a);
    const Symbol weight = sobolev_weight(a.backend(), m);
    std::vector<double> mins(A.num_points(), std::numeric_limits<double>::infinity());
    std::vector<std::size_t> where(A.num_points(), 0);
    parallel_for(A.num_points(), [&](std::size_t p) {
        if (!A.in_interior(p)) return;
        for (std::size_t ix = 0; ix < A.x_slices(); ++ix) {
            const CMatrix d = CMatrix(A.block(ix, p)) - C0 * CMatrix(weight.block(0, p));
            const double ev = smallest_eigenvalue(d);
            if (ev < mins[p]) {
                mins[p] = ev;
                where[p] = ix;
            }
        }
    });
    LowerBoundResult res;
    res.margin = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < mins.size(); ++p)
        if (mins[p] < res.margin) {
            res.margin = mins[p];
            res.worst_point = p;
            res.worst_x = where[p];
        }
    res.holds = res.margin >= 0.0;
    return res;
}

GardingReport garding_certify(const Symbol& a, double m, double C0, double C1, int trials, std::uint64_t seed) {
    require(trials >= 1, ErrorKind::config, "garding needs at least one trial");
    require(C1 > 0 && C1 <= C0, ErrorKind::config, "C1 must lie in (0, C0]");
    const auto lb = lower_bound_check(a, m, C0);
    if (!lb.holds) {
        std::ostringstream os;
        os << "real part is not bounded below by C0 pi(M)^m with C0 = " << C0 << ": margin " << lb.margin
           << " at representation point " << lb.worst_point << " (x-index " << lb.worst_x << ")";
        fail(ErrorKind::positivity, os.str());
    }
    const auto ell = is_elliptic(a, m, 0.0, {0.0});
    if (!ell.is_elliptic) fail(ErrorKind::not_elliptic, "garding_certify needs an elliptic symbol");

    const auto& backend = a.backend();
    GardingReport rep;
    rep.C0 = C0;
    rep.C1 = C1;
    rep.trials = trials;
    rep.seed = seed;
    rep.expected_remainder_order = m - (a.rho() - a.delta());

    const Symbol A = real_part_symbol(a);
    Symbol D = A - C1 * sobolev_weight(backend, m);
    D = hermitian_part(D);
    const double scale = std::max(1.0, max_abs(A));
    rep.q_is_zero = max_abs(D) <= 1e-12 * scale;
    if (!rep.q_is_zero) {
        const Symbol q = sqrt_symbol(D);
        Symbol qq = a.is_invariant() ? pointwise_product(q, pointwise_adjoint(q))
                                     : compose(q, adjoint_symbol(q, 2), 2);
        const Symbol r = qq - D;
        double sup = 0.0;
        for (std::size_t p = 0; p < r.num_points(); ++p) {
            if (!r.in_interior(p)) continue;
            for (std::size_t ix = 0; ix < r.x_slices(); ++ix) sup = std::max(sup, r.block(ix, p).norm());
        }
        rep.remainder_sup = sup;
        if (!a.is_invariant()) rep.remainder_order = remainder_growth(r);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<TrialValue> values(trials);
    const double nu = backend->rockland_degree();

    if (a.is_invariant()) {
        for (int t = 0; t < trials; ++t) {
            FourierField u(backend);
            for (std::size_t p = 0; p < u.num_points(); ++p) {
                const auto spec = backend->spectrum(p);
                for (std::size_t j = 0; j < u.dim(); ++j)
                    for (std::size_t i = 0; i < u.dim(); ++i) {
                        const double re = gauss(rng), im = gauss(rng);
                        u.at(p, i, j) = cplx(re, im) / ((1.0 + spec[i]) * (1.0 + spec[i]));
                    }
            }
            const double norm = sobolev_norm(*backend, u, 0.0);
            u *= cplx(1.0 / norm, 0.0);
            const cplx form = plancherel_inner(*backend, apply_op(a, u), u);
            const double hs = sobolev_norm(*backend, u, m / 2.0);
            values[t] = {form.real() - C1 * hs * hs, std::pow(sobolev_norm(*backend, u, 0.0), 2)};
        }
    } else {
        const std::size_t nx = a.nx();
        // test functions: integer frequencies present on the xi-grid
        std::vector<long> freqs;
        for (std::size_t j = 0; j < nx; ++j) {
            const long k = dft_frequency(j, nx);
            const double kd = static_cast<double>(k);
            freqs.push_back(2 * std::abs(k) < static_cast<long>(nx) &&
                                    backend->find_point(std::span<const double>(&kd, 1))
                                ? k
                                : std::numeric_limits<long>::min());
        }
        const double cell = 2.0 * std::numbers::pi;
        for (int t = 0; t < trials; ++t) {
            std::vector<cplx> c(nx, cplx{});
            for (std::size_t j = 0; j < nx; ++j) {
                const double re = gauss(rng), im = gauss(rng);
                if (freqs[j] == std::numeric_limits<long>::min()) continue;
                const double mu = 1.0 + double(freqs[j]) * double(freqs[j]);
                c[j] = cplx(re, im) / (mu * mu);
            }
            double l2 = 0.0;
            for (const auto& v : c) l2 += cell * std::norm(v);
            for (auto& v : c) v /= std::sqrt(l2);
            double hs = 0.0;
            for (std::size_t j = 0; j < nx; ++j) {
                if (freqs[j] == std::numeric_limits<long>::min()) continue;
                const double mu = 1.0 + double(freqs[j]) * double(freqs[j]);
                hs += cell * std::pow(mu, (m / 2.0) * 2.0 / nu) * std::norm(c[j]);
            }
            const auto u = dft_inverse(c);
            const auto au = apply_op(a, std::span<const cplx>(u));
            cplx form{};
            for (std::size_t ix = 0; ix < nx; ++ix) form += au[ix] * std::conj(u[ix]);
            form *= cell / static_cast<double>(nx);
            double norm2 = 0.0;
            for (const auto& v : c) norm2 += cell * std::norm(v);
            values[t] = {form.real() - C1 * hs, norm2};
        }
    }

    double c2 = 0.0;
    for (const auto& v : values) c2 = std::max(c2, -v.quad / v.l2);
    if (c2 <= garding_tolerance) c2 = 0.0;
    rep.C2 = c2;
    rep.margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const double margin = values[t].quad + c2 * values[t].l2;
        if (margin < rep.margin) {
            rep.margin = margin;
            rep.witness = static_cast<std::size_t>(t);
        }
    }
    rep.certified = rep.margin >= -garding_tolerance;
    rep.roundoff_flag = rep.certified && rep.margin < 0.0;
    return rep;
}

double interpolation_constant(const GroupBackend& backend, double s, double t, double eps) {
    require((s >= t && t >= 0.0) || (s < 0.0 && t < 0.0), ErrorKind::contract,
            "interpolation needs s >= t >= 0 or s, t < 0");
    require(eps > 0.0, ErrorKind::contract, "interpolation needs eps > 0");
    const double nu = backend.rockland_degree();
    double C = 0.0;
    for (std::size_t p = 0; p < backend.num_points(); ++p) {
        for (double ev : backend.spectrum(p)) {
            const double x = std::pow(1.0 + ev, 2.0 * t / nu);
            const double y = eps * std::pow(1.0 + ev, 2.0 * s / nu);
            double c = x - y;
            while (y + c < x) c = std::nextafter(c, std::numeric_limits<double>::infinity());
            C = std::max(C, c);
        }
    }
    return C;
}

Symbol random_hermitian_symbol(const BackendPtr& backend, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const long n = static_cast<long>(backend->truncation());
    return Symbol::invariant(
        backend,
        [&](std::size_t) {
            CMatrix g(n, n);
            for (long j = 0; j < n; ++j)
                for (long i = 0; i < n; ++i) g(i, j) = {gauss(rng), gauss(rng)};
            CMatrix h = 0.5 * (g + g.adjoint());
            if (n == 1) h(0, 0) = h(0, 0).real() >= 0 ? 1.0 : -1.0;
            else {
                Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
                h /= solver.eigenvalues().cwiseAbs().maxCoeff();
            }
            return h;
        },
        0.0);
}

} // namespace pdo
