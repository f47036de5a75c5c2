#include "pdo/funcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pdo/error.hpp"
#include "pdo/parallel.hpp"
#include "pdo/quadrature.hpp"

namespace pdo {

namespace {

constexpr double pi = std::numbers::pi;

ContourSegment ray_segment(double angle, double r_from, double r_to, const GaussRule& rule) {
    // z = e^{i angle} e^t with t running from log r_from to log r_to
    ContourSegment seg{"ray", {}, {}};
    const double t0 = std::log(r_from), t1 = std::log(r_to);
    const double half = 0.5 * (t1 - t0), mid = 0.5 * (t1 + t0);
    const cplx dir = std::polar(1.0, angle);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = mid + half * rule.nodes[j];
        const cplx z = dir * std::exp(t);
        seg.nodes.push_back(z);
        seg.weights.push_back(rule.weights[j] * half * z);
    }
    return seg;
}

ContourSegment arc_segment(double radius, double phi_from, double phi_to, const GaussRule& rule) {
    ContourSegment seg{"arc", {}, {}};
    const double half = 0.5 * (phi_to - phi_from), mid = 0.5 * (phi_to + phi_from);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const cplx z = std::polar(radius, mid + half * rule.nodes[j]);
        seg.nodes.push_back(z);
        seg.weights.push_back(rule.weights[j] * half * cplx(0.0, 1.0) * z);
    }
    return seg;
}

double distance_to_ray(cplx z, double angle, double r0, double r1) {
    const cplx dir = std::polar(1.0, angle);
    const double t = std::clamp((z * std::conj(dir)).real(), r0, r1);
    return std::abs(z - t * dir);
}

double distance_to_arc(cplx z, double radius, double half_angle) {
    // arc of the given radius covering |arg| <= half_angle
    const double arg = std::arg(z);
    if (std::abs(arg) <= half_angle) return std::abs(std::abs(z) - radius);
    return std::min(std::abs(z - std::polar(radius, half_angle)), std::abs(z - std::polar(radius, -half_angle)));
}

bool is_diagonal(const CMatrix& m) {
    for (long j = 0; j < m.cols(); ++j)
        for (long i = 0; i < m.rows(); ++i)
            if (i != j && m(i, j) != cplx{}) return false;
    return true;
}

void check_decay(const HolomorphicFunction& F, const Contour& contour) {
    if (!(F.decay < 0.0)) {
        std::ostringstream os;
        os << "function '" << F.name << "' has decay exponent " << F.decay << "; the contour integral needs s < 0";
        fail(ErrorKind::decay, os.str());
    }
    // Spot-check |F(z)| |z|^{-s} on the nodes: the ratio on the far part of
    // the contour must not exceed what is seen near |z| = 1.
    double near = 0.0, far = 0.0;
    for (const auto& seg : contour.segments) {
        for (cplx z : seg.nodes) {
            const cplx v = F.f(z);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream os;
                os << "function '" << F.name << "' is not finite at contour node " << z;
                fail(ErrorKind::decay, os.str());
            }
            const double r = std::abs(z);
            const double ratio = std::abs(v) * std::pow(r, -F.decay);
            if (r <= std::max(10.0, 10.0 * contour.epsilon)) near = std::max(near, ratio);
            if (r >= 0.5 * contour.r_max) far = std::max(far, ratio);
        }
    }
    if (far > 10.0 * std::max(near, 1e-300)) {
        std::ostringstream os;
        os << "function '" << F.name << "' violates |F(z)| <= C|z|^" << F.decay
           << " along the contour (ratio " << far << " far out vs " << near << " near the origin)";
        fail(ErrorKind::decay, os.str());
    }
}

void check_spectrum(const CMatrix& a, const Contour& contour, std::size_t ix, std::size_t point) {
    Eigen::VectorXcd eig;
    if (is_diagonal(a)) {
        eig = a.diagonal();
    } else {
        Eigen::ComplexEigenSolver<CMatrix> solver(a, false);
        eig = solver.eigenvalues();
    }
    for (long k = 0; k < eig.size(); ++k) {
        const cplx mu = eig[k];
        const double dist = contour.distance(mu);
        if (!contour.encloses(mu) || !(dist > 0.5 * contour.epsilon)) {
            std::ostringstream os;
            os << "eigenvalue " << mu << " at representation point " << point << " (x-index " << ix
               << ") is not inside the contour with margin eps/2 = " << 0.5 * contour.epsilon
               << " (distance " << dist << ")";
            fail(ErrorKind::contour, os.str());
        }
    }
}

CMatrix contour_sum(const CMatrix& a, const HolomorphicFunction& F, const Contour& contour) {
    const long n = a.rows();
    const bool diag = is_diagonal(a);
    CMatrix acc = CMatrix::Zero(n, n);
    const CMatrix id = CMatrix::Identity(n, n);
    for (const auto& seg : contour.segments) {
        for (std::size_t j = 0; j < seg.nodes.size(); ++j) {
            const cplx z = seg.nodes[j];
            const cplx c = seg.weights[j] * F.f(z);
            if (diag) {
                for (long i = 0; i < n; ++i) acc(i, i) += c / (a(i, i) - z);
            } else {
                acc += c * (a - z * id).partialPivLu().inverse();
            }
        }
    }
    return acc * (-1.0 / (2.0 * pi * cplx(0.0, 1.0)));
}

} // namespace

Contour keyhole_contour(double epsilon, double theta, double r_max, int n_nodes) {
    require(epsilon > 0 && epsilon < r_max, ErrorKind::config, "contour needs 0 < epsilon < r_max");
    require(theta > 0 && theta < pi / 2, ErrorKind::config, "contour theta must lie in (0, pi/2)");
    require(n_nodes >= 2, ErrorKind::config, "contour needs at least 2 nodes per segment");
    Contour c;
    c.epsilon = epsilon;
    c.theta = theta;
    c.r_max = r_max;
    c.n_nodes = n_nodes;
    const GaussRule rule = gauss_legendre(n_nodes);
    const double phi = pi - theta;
    c.segments.push_back(ray_segment(phi, r_max, epsilon, rule));    // upper ray, inward
    c.segments.push_back(arc_segment(epsilon, phi, -phi, rule));     // inner arc, clockwise
    c.segments.push_back(ray_segment(-phi, epsilon, r_max, rule));   // lower ray, outward
    c.segments.push_back(arc_segment(r_max, -phi, phi, rule));       // outer arc, counterclockwise
    return c;
}

Contour Contour::reversed() const {
    Contour c = *this;
    std::reverse(c.segments.begin(), c.segments.end());
    for (auto& seg : c.segments) {
        std::reverse(seg.nodes.begin(), seg.nodes.end());
        std::reverse(seg.weights.begin(), seg.weights.end());
        for (auto& w : seg.weights) w = -w;
    }
    return c;
}

std::size_t Contour::size() const {
    std::size_t n = 0;
    for (const auto& seg : segments) n += seg.nodes.size();
    return n;
}

bool Contour::encloses(cplx z) const {
    const double r = std::abs(z);
    return r > epsilon && r < r_max && std::abs(std::arg(z)) < pi - theta;
}

double Contour::distance(cplx z) const {
    const double phi = pi - theta;
    return std::min({distance_to_ray(z, phi, epsilon, r_max), distance_to_ray(z, -phi, epsilon, r_max),
                     distance_to_arc(z, epsilon, phi), distance_to_arc(z, r_max, phi)});
}

HolomorphicFunction inverse_function() {
    return {"inv", [](cplx z) { return 1.0 / z; }, -1.0};
}

HolomorphicFunction inverse_sqrt_function() {
    return {"inv_sqrt", [](cplx z) { return 1.0 / std::sqrt(z); }, -0.5};
}

HolomorphicFunction power_function(cplx s) {
    std::ostringstream name;
    name << "power(" << s.real();
    if (s.imag() != 0.0) name << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i";
    name << ")";
    return {name.str(), [s](cplx z) { return std::pow(z, s); }, s.real()};
}

HolomorphicFunction exp_neg_inverse_function() {
    return {"exp_neg_inv", [](cplx z) { return std::exp(-z) / z; }, -1.0};
}

HolomorphicFunction holomorphic_from_name(const std::string& name, double parameter) {
    if (name == "inv") return inverse_function();
    if (name == "inv_sqrt") return inverse_sqrt_function();
    if (name == "power") return power_function(parameter);
    if (name == "exp_neg_inv") return exp_neg_inverse_function();
    fail(ErrorKind::config, "unknown function '" + name + "' (expected inv, inv_sqrt, power, exp_neg_inv)");
}

CMatrix dunford_riesz(const CMatrix& a, const HolomorphicFunction& F, const Contour& contour) {
    require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::shape, "dunford_riesz needs a square matrix");
    check_decay(F, contour);
    check_spectrum(a, contour, 0, 0);
    return contour_sum(a, F, contour);
}

Symbol dunford_riesz(const Symbol& a, const HolomorphicFunction& F, const Contour& contour) {
    check_decay(F, contour);
    Symbol out(a.backend(), a.nx(), a.order() * F.decay, a.rho(), a.delta());
    out.set_fd_margin(a.fd_margin());
    parallel_for(a.num_points(), [&](std::size_t p) {
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            const CMatrix blk = a.block(ix, p);
            check_spectrum(blk, contour, ix, p);
            out.block(ix, p) = contour_sum(blk, F, contour);
        }
    });
    return out;
}

CMatrix matfun_oracle(const CMatrix& m, const std::function<cplx(double)>& F) {
    require(m.rows() == m.cols() && m.rows() > 0, ErrorKind::shape, "matfun_oracle needs a square matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorKind::contract,
            "matfun_oracle needs a hermitian matrix");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
    const auto& d = solver.eigenvalues();
    CVector fd(d.size());
    for (long k = 0; k < d.size(); ++k) fd[k] = F(d[k]);
    return solver.eigenvectors() * fd.asDiagonal() * solver.eigenvectors().adjoint();
}

Contour spectrum_contour(double lambda_min, double lambda_max) {
    return keyhole_contour(std::min(0.5, 0.5 * lambda_min), 0.35, std::max(1e4, 10.0 * lambda_max), 200);
}

namespace {

// Smallest and largest eigenvalue over all points; throws when a point is
// not hermitian positive definite.
std::pair<double, double> positive_range(const Symbol& a) {
    std::vector<double> lo(a.num_points() * a.x_slices()), hi(lo.size());
    parallel_for(a.num_points(), [&](std::size_t p) {
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            const CMatrix blk = a.block(ix, p);
            const double scale = std::max(1.0, blk.cwiseAbs().maxCoeff());
            if ((blk - blk.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
                std::ostringstream os;
                os << "symbol is not hermitian at representation point " << p << " (x-index " << ix << ")";
                fail(ErrorKind::positivity, os.str());
            }
            Eigen::VectorXd ev;
            if (is_diagonal(blk)) {
                ev = blk.diagonal().real();
            } else {
                Eigen::SelfAdjointEigenSolver<CMatrix> solver(blk, Eigen::EigenvaluesOnly);
                ev = solver.eigenvalues();
            }
            const double mn = ev.minCoeff(), mx = ev.maxCoeff();
            if (!(mn > positivity_threshold)) {
                std::ostringstream os;
                os << "symbol is not positive definite at representation point " << p << " (x-index " << ix
                   << "): smallest eigenvalue " << mn;
                fail(ErrorKind::positivity, os.str());
            }
            lo[p * a.x_slices() + ix] = mn;
            hi[p * a.x_slices() + ix] = mx;
        }
    });
    return {*std::min_element(lo.begin(), lo.end()), *std::max_element(hi.begin(), hi.end())};
}

} // namespace

Symbol complex_power(const Symbol& a, cplx s, const std::optional<Contour>& contour) {
    const auto [lmin, lmax] = positive_range(a);
    const Contour c = contour ? *contour : spectrum_contour(lmin, lmax);
    if (s.real() < 0.0) {
        Symbol out = dunford_riesz(a, power_function(s), c);
        out.set_order(a.order() * s.real());
        return out;
    }
    const int k = static_cast<int>(std::floor(s.real())) + 1;
    Symbol out = dunford_riesz(a, power_function(s - static_cast<double>(k)), c);
    for (int j = 0; j < k; ++j) out = pointwise_product(out, a);
    out.set_order(a.order() * s.real());
    return out;
}

Symbol sqrt_symbol(const Symbol& a) {
    Symbol root = complex_power(a, 0.5);
    double worst = 0.0;
    std::size_t worst_p = 0, worst_x = 0;
    for (std::size_t p = 0; p < a.num_points(); ++p) {
        for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
            const CMatrix r = root.block(ix, p);
            const CMatrix orig = a.block(ix, p);
            const double err = (r * r - orig).norm() / orig.norm();
            if (err > worst) {
                worst = err;
                worst_p = p;
                worst_x = ix;
            }
        }
    }
    if (!(worst < 1e-8)) {
        std::ostringstream os;
        os << "square root fails the square-back check: relative error " << worst << " at representation point "
           << worst_p << " (x-index " << worst_x << ")";
        fail(ErrorKind::accuracy, os.str());
    }
    return root;
}

} // namespace pdo
