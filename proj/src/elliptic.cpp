#include "pdo/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "pdo/error.hpp"
#include "pdo/parallel.hpp"

namespace pdo {

namespace {

bool is_diagonal(const ConstCMap& m) {
    for (long j = 0; j < m.cols(); ++j)
        for (long i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != cplx{}) return false;
    return true;
}

bool is_diagonal(const CMatrix& m) {
    return is_diagonal(ConstCMap(m.data(), m.rows(), m.cols()));
}

// Inverse of (block - lambda I); returns the smallest singular value of the
// shifted block so the caller can refuse near-singular points.
double shifted_inverse(const ConstCMap& block, cplx lambda, CMatrix& out) {
    const long n = block.rows();
    if (is_diagonal(block)) {
        out = CMatrix::Zero(n, n);
        double smin = std::numeric_limits<double>::infinity();
        for (long i = 0; i < n; ++i) {
            const cplx d = block(i, i) - lambda;
            smin = std::min(smin, std::abs(d));
            out(i, i) = 1.0 / d;
        }
        return smin;
    }
    CMatrix shifted = block - lambda * CMatrix::Identity(n, n);
    Eigen::JacobiSVD<CMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smin = sv(n - 1);
    out = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    return smin;
}

[[noreturn]] void singular_error(std::size_t ix, std::size_t point, cplx lambda, double smin) {
    std::ostringstream os;
    os.precision(6);
    os << "resolvent is singular at representation point " << point << " (x-index " << ix << ") for lambda = "
       << lambda.real() << (lambda.imag() < 0 ? "-" : "+") << std::abs(lambda.imag())
       << "i: smallest singular value " << std::setprecision(3) << smin;
    fail(ErrorKind::singular, os.str());
}

double op_norm(const CMatrix& m) {
    if (m.size() == 1) return std::abs(m(0, 0));
    if (is_diagonal(m)) return m.diagonal().cwiseAbs().maxCoeff();
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

std::vector<double> log_ladder(int per_decade, double r_min, double r_max) {
    require(per_decade >= 1, ErrorKind::config, "per_decade must be >= 1");
    require(r_min > 0 && r_max > r_min, ErrorKind::config, "ladder needs 0 < r_min < r_max");
    const int steps = static_cast<int>(std::ceil(per_decade * std::log10(r_max / r_min) - 1e-9));
    std::vector<double> r;
    r.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) r.push_back(r_min * std::pow(10.0, static_cast<double>(k) / per_decade));
    r.back() = r_max;
    return r;
}

void fill_samples(CurveSpec& c) {
    c.samples.clear();
    const auto radii = log_ladder(c.per_decade, c.r_min, c.r_max);
    if (c.kind == CurveSpec::Kind::negative_real_axis) {
        for (double r : radii) c.samples.emplace_back(-r, 0.0);
    } else {
        const double angle = std::numbers::pi - c.theta;
        for (double r : radii) {
            c.samples.push_back(std::polar(r, angle));
            c.samples.push_back(std::polar(r, -angle));
        }
    }
}

} // namespace

CurveSpec CurveSpec::negative_real_axis(int per_decade, double r_min, double r_max) {
    CurveSpec c;
    c.kind = Kind::negative_real_axis;
    c.per_decade = per_decade;
    c.r_min = r_min;
    c.r_max = r_max;
    fill_samples(c);
    return c;
}

CurveSpec CurveSpec::ray_pair(double theta, int per_decade, double r_min, double r_max) {
    require(theta > 0 && theta < std::numbers::pi, ErrorKind::config, "ray angle must lie in (0, pi)");
    CurveSpec c;
    c.kind = Kind::ray_pair;
    c.theta = theta;
    c.per_decade = per_decade;
    c.r_min = r_min;
    c.r_max = r_max;
    fill_samples(c);
    return c;
}

CurveSpec CurveSpec::custom(std::vector<cplx> points) {
    require(!points.empty(), ErrorKind::config, "custom curve needs at least one point");
    CurveSpec c;
    c.kind = Kind::custom;
    c.samples = std::move(points);
    return c;
}

CurveSpec CurveSpec::doubled() const {
    if (kind == Kind::custom) return *this;
    CurveSpec c = *this;
    c.per_decade = 2 * per_decade;
    fill_samples(c);
    return c;
}

EllipticityReport is_elliptic(const Symbol& a, double m0, double lambda_spec, const std::vector<double>& gammas) {
    require(lambda_spec >= 0.0, ErrorKind::config, "Lambda_spec must be >= 0");
    const auto& backend = *a.backend();
    const double nu = backend.rockland_degree();
    const std::size_t n = a.dim();

    EllipticityReport report;
    report.m0 = m0;
    report.lambda_spec = lambda_spec;
    report.gammas = gammas;
    double overall = std::numeric_limits<double>::infinity();

    for (double gamma : gammas) {
        std::vector<double> point_min(a.num_points(), std::numeric_limits<double>::infinity());
        std::vector<std::size_t> point_x(a.num_points(), 0);
        parallel_for(a.num_points(), [&](std::size_t p) {
            if (!a.in_interior(p)) return;
            const auto spec = backend.spectrum(p);
            std::vector<long> high;
            for (std::size_t k = 0; k < n; ++k)
                if (spec[k] > lambda_spec) high.push_back(static_cast<long>(k));
            if (high.empty()) return;
            Eigen::VectorXd wl(n), wr(static_cast<long>(high.size()));
            for (std::size_t k = 0; k < n; ++k) wl[k] = std::pow(1.0 + spec[k], gamma / nu);
            for (std::size_t c = 0; c < high.size(); ++c)
                wr[c] = std::pow(1.0 + spec[high[c]], (-gamma - m0) / nu);
            for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
                const auto blk = a.block(ix, p);
                double smin;
                if (n == 1) {
                    smin = wl[0] * std::abs(blk(0, 0)) * wr[0];
                } else {
                    CMatrix restricted(n, high.size());
                    for (std::size_t c = 0; c < high.size(); ++c) restricted.col(c) = blk.col(high[c]);
                    const CMatrix weighted = wl.asDiagonal() * restricted * wr.asDiagonal();
                    Eigen::JacobiSVD<CMatrix> svd(weighted);
                    smin = svd.singularValues()(svd.singularValues().size() - 1);
                }
                if (smin < point_min[p]) {
                    point_min[p] = smin;
                    point_x[p] = ix;
                }
            }
        });
        double lower = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < a.num_points(); ++p) {
            if (point_min[p] < lower) {
                lower = point_min[p];
                if (lower < overall) {
                    overall = lower;
                    report.worst_point = p;
                    report.worst_x = point_x[p];
                }
            }
        }
        report.lower_bounds.push_back(lower);
        report.sup_values.push_back(lower > 0 ? 1.0 / lower : std::numeric_limits<double>::infinity());
    }
    report.is_elliptic = !gammas.empty();
    for (double lb : report.lower_bounds)
        if (!(lb > singular_threshold)) report.is_elliptic = false;
    return report;
}

Symbol resolvent(const Symbol& a, cplx lambda) {
    Symbol out(a.backend(), a.nx(), -a.order(), a.rho(), a.delta());
    out.set_fd_margin(a.fd_margin());
    const std::size_t slices = a.x_slices();
    parallel_for(a.num_points(), [&](std::size_t p) {
        CMatrix inv;
        for (std::size_t ix = 0; ix < slices; ++ix) {
            const double smin = shifted_inverse(a.block(ix, p), lambda, inv);
            if (!(smin > singular_threshold)) singular_error(ix, p, lambda, smin);
            out.block(ix, p) = inv;
        }
    });
    return out;
}

Symbol resolvent_derivative(const Symbol& a, cplx lambda, int k) {
    require(k >= 0, ErrorKind::config, "derivative order must be >= 0");
    const Symbol r = resolvent(a, lambda);
    Symbol out = r;
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) {
        out = pointwise_product(out, r);
        fact *= j;
    }
    out = cplx(fact, 0.0) * out;
    out.set_order(-a.order() * (k + 1));
    return out;
}

namespace {

// Sup over the grid of the weighted resolvent quantity at one curve sample.
double sample_sup(const Symbol& a, cplx lambda, double m, int k, const MultiIndex& alpha, const MultiIndex& beta) {
    const auto& backend = *a.backend();
    const double nu = backend.rockland_degree();
    const double lam_root = std::pow(std::abs(lambda), 1.0 / m);
    const bool plain = std::all_of(alpha.begin(), alpha.end(), [](int v) { return v == 0; }) &&
                       std::all_of(beta.begin(), beta.end(), [](int v) { return v == 0; });
    const double shift_exp =
        plain ? 0.0
              : (a.rho() * homogeneous_degree(backend, alpha) - a.delta() * homogeneous_degree(backend, beta)) / nu;
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;

    Symbol derived;
    if (!plain) {
        if (backend.kind() == GroupKind::heisenberg)
            fail(ErrorKind::unsupported, "resolvent estimates with alpha or beta != 0 need the abelian backend");
        derived = x_derivative(difference_op(resolvent_derivative(a, lambda, k), alpha), beta);
    }

    const std::size_t n = a.dim();
    std::vector<double> per_point(a.num_points(), 0.0);
    parallel_for(a.num_points(), [&](std::size_t p) {
        if (!plain && !derived.in_interior(p)) return;
        const auto spec = backend.spectrum(p);
        Eigen::VectorXd w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double mi = std::pow(1.0 + spec[i], 1.0 / nu);
            w[i] = std::pow(lam_root + mi, m * (k + 1)) * std::pow(1.0 + spec[i], shift_exp);
        }
        double best = 0.0;
        CMatrix inv;
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            CMatrix d;
            if (plain) {
                const double smin = shifted_inverse(a.block(ix, p), lambda, inv);
                if (!(smin > singular_threshold)) singular_error(ix, p, lambda, smin);
                d = inv;
                for (int j = 0; j < k; ++j) d = d * inv;
                d *= fact;
            } else {
                d = derived.block(ix, p);
            }
            best = std::max(best, op_norm(w.asDiagonal() * d));
        }
        per_point[p] = best;
    });
    double sup = 0.0;
    for (double v : per_point) sup = std::max(sup, v);
    return sup;
}

CurveSupReport curve_sup(const Symbol& a, const CurveSpec& curve, double m, int k, const MultiIndex& alpha,
                         const MultiIndex& beta) {
    require(m > 0, ErrorKind::config, "order m must be > 0");
    require(k >= 0, ErrorKind::config, "derivative order must be >= 0");
    require(!curve.samples.empty(), ErrorKind::config, "curve has no samples");
    CurveSupReport report;
    for (cplx lambda : curve.samples) {
        const double v = sample_sup(a, lambda, m, k, alpha, beta);
        report.lambda_abs.push_back(std::abs(lambda));
        report.sample_sup.push_back(v);
        if (v > report.value) {
            report.value = v;
            report.worst_lambda = lambda;
        }
    }
    if (curve.kind == CurveSpec::Kind::custom) {
        report.refined_value = report.value;
    } else {
        const CurveSpec fine = curve.doubled();
        for (cplx lambda : fine.samples)
            report.refined_value = std::max(report.refined_value, sample_sup(a, lambda, m, k, alpha, beta));
    }
    const double scale = std::max(report.value, report.refined_value);
    report.stable = std::isfinite(report.value) && std::isfinite(report.refined_value) &&
                    std::abs(report.refined_value - report.value) < report.stability_tolerance * scale;
    return report;
}

} // namespace

CurveSupReport parameter_ellipticity_report(const Symbol& a, const CurveSpec& curve, double m) {
    return curve_sup(a, curve, m, 0, {}, {});
}

CurveSupReport resolvent_estimate_check(const Symbol& a, const CurveSpec& curve, double m, int k,
                                        const MultiIndex& alpha, const MultiIndex& beta) {
    return curve_sup(a, curve, m, k, alpha, beta);
}

// ---- parametrix --------------------------------------------------------

namespace {

// sigma^{-1} E(Lambda, inf) per point; zero where no eigenvalue exceeds the
// cutoff.
Symbol cutoff_inverse(const Symbol& sigma, double lambda_spec) {
    const auto& backend = *sigma.backend();
    Symbol out(sigma.backend(), sigma.nx(), -sigma.order(), sigma.rho(), sigma.delta());
    out.set_fd_margin(sigma.fd_margin());
    const std::size_t n = sigma.dim();
    parallel_for(sigma.num_points(), [&](std::size_t p) {
        const auto spec = backend.spectrum(p);
        Eigen::VectorXd proj(n);
        bool any = false;
        for (std::size_t k = 0; k < n; ++k) {
            proj[k] = spec[k] > lambda_spec ? 1.0 : 0.0;
            any = any || proj[k] > 0;
        }
        if (!any) return;
        CMatrix inv;
        for (std::size_t ix = 0; ix < sigma.x_slices(); ++ix) {
            const double smin = shifted_inverse(sigma.block(ix, p), 0.0, inv);
            if (!(smin > singular_threshold)) {
                std::ostringstream os;
                os << "symbol is not invertible at representation point " << p << " (x-index " << ix
                   << "), smallest singular value " << smin;
                fail(ErrorKind::not_elliptic, os.str());
            }
            out.block(ix, p) = inv * proj.asDiagonal();
        }
    });
    return out;
}

} // namespace

Symbol parametrix(const Symbol& sigma, int n_corrections, double lambda_spec) {
    require(n_corrections >= 0, ErrorKind::config, "correction count must be >= 0");
    const auto report = is_elliptic(sigma, sigma.order(), lambda_spec, {0.0});
    if (!report.is_elliptic) {
        std::ostringstream os;
        os << "symbol is not elliptic of order " << sigma.order() << " above Lambda = " << lambda_spec
           << " (lower bound " << report.lower_bounds.front() << " at point " << report.worst_point << ")";
        fail(ErrorKind::not_elliptic, os.str());
    }
    if (n_corrections > 0 && sigma.backend()->kind() != GroupKind::abelian)
        fail(ErrorKind::unsupported, "parametrix corrections need difference operators, available on the abelian "
                                     "backend only");

    const Symbol tau0 = cutoff_inverse(sigma, lambda_spec);
    std::vector<Symbol> taus{tau0};
    std::vector<Symbol> sigma_derivs{sigma};  // d_xi^g sigma / g!
    for (int g = 1; g <= n_corrections; ++g)
        sigma_derivs.push_back((1.0 / g) * xi_derivative(sigma_derivs.back(), {1}));

    Symbol total = tau0;
    for (int level = 1; level <= n_corrections; ++level) {
        Symbol acc(sigma.backend(), sigma.nx(), sigma.order() - level, sigma.rho(), sigma.delta());
        for (int k = 0; k < level; ++k) {
            const int g = level - k;
            // D_x^g = (-i)^g d_x^g
            static constexpr cplx minus_i_powers[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
            const Symbol dx = minus_i_powers[g % 4] * x_derivative(taus[k], {g});
            acc = acc + pointwise_product(sigma_derivs[g], dx);
        }
        Symbol tau = cplx(-1.0, 0.0) * pointwise_product(tau0, acc);
        tau.set_order(-sigma.order() - (sigma.rho() - sigma.delta()) * level);
        total = total + tau;
        taus.push_back(std::move(tau));
    }
    total.set_order(-sigma.order());
    return total;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::config, "slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0 && y[i] > 0, ErrorKind::domain, "log-log fit needs positive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ResidualStudy parametrix_residual_study(const Symbol& sigma, int n_corrections, double lambda_spec,
                                        const std::vector<double>& frequencies, int band) {
    require(sigma.backend()->kind() == GroupKind::abelian && sigma.backend()->params().n == 1,
            ErrorKind::unsupported, "residual study runs on the one-dimensional abelian backend");
    require(!sigma.is_invariant(), ErrorKind::config, "residual study needs an x-grid (x-dependent symbol)");
    require(band >= 0, ErrorKind::config, "band must be >= 0");
    const Symbol tau = parametrix(sigma, n_corrections, lambda_spec);
    const std::size_t nx = sigma.nx();

    ResidualStudy study;
    for (double freq : frequencies) {
        const long centre = std::lround(freq);
        require(std::abs(freq - static_cast<double>(centre)) < 1e-12, ErrorKind::config,
                "test frequencies must be integers");
        require(static_cast<std::size_t>(2 * (std::abs(centre) + band)) < nx, ErrorKind::config,
                "test frequency too close to the Nyquist limit of the x-grid");
        std::vector<cplx> u(nx, cplx{});
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = sigma.x(ix);
            for (long j = -band; j <= band; ++j)
                u[ix] += std::exp(-0.5 * double(j * j)) * std::polar(1.0, double(centre + j) * x);
        }
        const auto v = apply_op(tau, std::span<const cplx>(u));
        const auto w = apply_op(sigma, std::span<const cplx>(v));
        double num = 0.0, den = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            num += std::norm(w[ix] - u[ix]);
            den += std::norm(u[ix]);
        }
        study.cutoffs.push_back(freq);
        study.residuals.push_back(std::sqrt(num / den));
    }
    if (study.cutoffs.size() >= 2) study.slope = loglog_slope(study.cutoffs, study.residuals);
    return study;
}

} // namespace pdo
