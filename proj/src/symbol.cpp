#include "pdo/symbol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "pdo/error.hpp"
#include "pdo/parallel.hpp"

namespace pdo {

namespace {

constexpr int stencil_width = 7;  // 6th-order first derivative
constexpr int stencil_half = 3;

// Fornberg's recursion for finite-difference weights of the first
// derivative at 0 on the nodes offsets[0..n).
std::array<double, stencil_width> first_derivative_weights(const std::array<double, stencil_width>& offsets) {
    constexpr int n = stencil_width;
    double c[n][2] = {};
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = offsets[0];
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, n> w{};
    for (int i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

// weights[d] is the stencil whose evaluation node sits at position d.
const std::array<std::array<double, stencil_width>, stencil_width>& stencil_table() {
    static const auto table = [] {
        std::array<std::array<double, stencil_width>, stencil_width> t{};
        for (int d = 0; d < stencil_width; ++d) {
            std::array<double, stencil_width> offsets{};
            for (int r = 0; r < stencil_width; ++r) offsets[r] = static_cast<double>(r - d);
            t[d] = first_derivative_weights(offsets);
        }
        return t;
    }();
    return table;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

bool all_zero(const MultiIndex& idx) {
    return std::all_of(idx.begin(), idx.end(), [](int v) { return v == 0; });
}

int total_order(const MultiIndex& idx) {
    int s = 0;
    for (int v : idx) s += v;
    return s;
}

cplx weight_pow(double base, cplx exponent) {
    if (exponent.imag() == 0.0) return std::pow(base, exponent.real());
    return std::pow(cplx(base, 0.0), exponent);
}

// First xi-derivative along one axis.
Symbol xi_derivative_once(const Symbol& a, int axis) {
    const auto& backend = *a.backend();
    const int m = backend.axis_points();
    require(m >= stencil_width, ErrorKind::boundary,
            "xi-grid has " + std::to_string(m) + " points per axis; the 6th-order stencil needs 7");
    const std::size_t stride = backend.axis_stride(axis);
    const double h = backend.xi_spacing();
    const auto& table = stencil_table();
    const std::size_t block = a.dim() * a.dim();

    Symbol out(a.backend(), a.nx(), a.order(), a.rho(), a.delta());
    out.set_fd_margin(a.fd_margin() + stencil_half);
    const auto& src = a.raw();
    auto& dst = out.raw();
    const std::size_t np = a.num_points();
    for (std::size_t ix = 0; ix < a.x_slices(); ++ix) {
        const std::size_t base = ix * np;
        for (std::size_t p = 0; p < np; ++p) {
            const int q = static_cast<int>(backend.axis_index(p, axis));
            const int s0 = std::clamp(q - stencil_half, 0, m - stencil_width);
            const auto& w = table[q - s0];
            for (std::size_t e = 0; e < block; ++e) {
                cplx acc{};
                for (int r = 0; r < stencil_width; ++r) {
                    const long shift = static_cast<long>(s0 + r - q) * static_cast<long>(stride);
                    const std::size_t src_point = static_cast<std::size_t>(static_cast<long>(p) + shift);
                    acc += w[r] * src[(base + src_point) * block + e];
                }
                dst[(base + p) * block + e] = acc / h;
            }
        }
    }
    return out;
}

Symbol x_derivative_once(const Symbol& a, int order) {
    Symbol out(a.backend(), a.nx(), a.order(), a.rho(), a.delta());
    out.set_fd_margin(a.fd_margin());
    const std::size_t nx = a.nx();
    const std::size_t np = a.num_points();
    const std::size_t block = a.dim() * a.dim();
    std::vector<cplx> line(nx);
    for (std::size_t p = 0; p < np; ++p) {
        for (std::size_t e = 0; e < block; ++e) {
            for (std::size_t ix = 0; ix < nx; ++ix) line[ix] = a.raw()[(ix * np + p) * block + e];
            const auto d = periodic_derivative(line, order);
            for (std::size_t ix = 0; ix < nx; ++ix) out.raw()[(ix * np + p) * block + e] = d[ix];
        }
    }
    return out;
}

void require_abelian(const Symbol& a, const char* what) {
    if (a.backend()->kind() != GroupKind::abelian) {
        fail(ErrorKind::unsupported,
             std::string(what) + " is only available on the abelian backend (general difference operators on "
                                 "the Heisenberg group are not implemented)");
    }
}

template <class F>
Symbol zip(const Symbol& a, const Symbol& b, double order, F&& f) {
    require_compatible(a, b);
    const std::size_t nx = a.is_invariant() ? b.nx() : a.nx();
    Symbol out(a.backend(), nx, order, std::min(a.rho(), b.rho()), std::max(a.delta(), b.delta()));
    out.set_fd_margin(std::max(a.fd_margin(), b.fd_margin()));
    for (std::size_t ix = 0; ix < out.x_slices(); ++ix)
        for (std::size_t p = 0; p < out.num_points(); ++p) out.block(ix, p) = f(a.block(ix, p), b.block(ix, p));
    return out;
}

} // namespace

// ---- Symbol ------------------------------------------------------------

Symbol::Symbol(BackendPtr backend, std::size_t nx, double order, double rho, double delta)
    : backend_(std::move(backend)), nx_(nx), order_(order) {
    require(backend_ != nullptr, ErrorKind::shape, "symbol needs a backend");
    if (nx_ > 0) {
        require(backend_->kind() == GroupKind::abelian, ErrorKind::unsupported,
                "x-dependent symbols are only supported on the abelian backend");
        require(backend_->params().n == 1, ErrorKind::unsupported,
                "x-dependent symbols are only supported on the one-dimensional abelian backend");
    }
    set_type(rho, delta);
    points_ = backend_->num_points();
    dim_ = backend_->truncation();
    data_.assign(x_slices() * points_ * dim_ * dim_, cplx{});
}

void Symbol::set_type(double rho, double delta) {
    require(0.0 <= delta && delta < rho && rho <= 1.0, ErrorKind::config,
            "symbol type requires 0 <= delta < rho <= 1");
    rho_ = rho;
    delta_ = delta;
}

double Symbol::x(std::size_t ix) const {
    require(nx_ > 0, ErrorKind::shape, "invariant symbol has no x-grid");
    return 2.0 * std::numbers::pi * static_cast<double>(ix) / static_cast<double>(nx_);
}

bool Symbol::in_interior(std::size_t point) const {
    if (fd_margin_ == 0 || backend_->kind() != GroupKind::abelian) return true;
    const int m = backend_->axis_points();
    for (int axis = 0; axis < backend_->params().n; ++axis) {
        const int q = static_cast<int>(backend_->axis_index(point, axis));
        if (q < fd_margin_ || q >= m - fd_margin_) return false;
    }
    return true;
}

bool Symbol::is_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

Symbol Symbol::identity(BackendPtr backend) {
    Symbol s(std::move(backend), 0, 0.0);
    for (std::size_t p = 0; p < s.num_points(); ++p) s.block(0, p).setIdentity();
    return s;
}

Symbol Symbol::invariant(BackendPtr backend, const std::function<CMatrix(std::size_t)>& f, double order) {
    Symbol s(std::move(backend), 0, order);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        CMatrix m = f(p);
        require(m.rows() == long(s.dim()) && m.cols() == long(s.dim()), ErrorKind::shape,
                "symbol block has the wrong dimension");
        s.block(0, p) = m;
    }
    return s;
}

Symbol Symbol::x_dependent(BackendPtr backend, std::size_t nx, const std::function<cplx(double, double)>& f,
                           double order) {
    require(nx >= 2, ErrorKind::config, "x-grid needs at least 2 points");
    Symbol s(std::move(backend), nx, order);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double x = s.x(ix);
        for (std::size_t p = 0; p < s.num_points(); ++p) s.at(ix, p) = f(x, s.backend()->xi(p));
    }
    return s;
}

// ---- pointwise algebra -------------------------------------------------

void require_compatible(const Symbol& a, const Symbol& b) {
    require(a.backend() && b.backend() && a.backend()->same_grid(*b.backend()), ErrorKind::shape,
            "symbols live on different backends");
    require(a.is_invariant() || b.is_invariant() || a.nx() == b.nx(), ErrorKind::shape,
            "symbols use different x-grids");
}

Symbol operator+(const Symbol& a, const Symbol& b) {
    return zip(a, b, std::max(a.order(), b.order()),
               [](const auto& x, const auto& y) -> CMatrix { return x + y; });
}

Symbol operator-(const Symbol& a, const Symbol& b) {
    return zip(a, b, std::max(a.order(), b.order()),
               [](const auto& x, const auto& y) -> CMatrix { return x - y; });
}

Symbol operator*(cplx c, const Symbol& a) {
    Symbol out = a;
    for (auto& v : out.raw()) v *= c;
    return out;
}

Symbol pointwise_product(const Symbol& a, const Symbol& b) {
    return zip(a, b, a.order() + b.order(), [](const auto& x, const auto& y) -> CMatrix { return x * y; });
}

Symbol pointwise_adjoint(const Symbol& a) {
    Symbol out = a;
    for (std::size_t ix = 0; ix < a.x_slices(); ++ix)
        for (std::size_t p = 0; p < a.num_points(); ++p) out.block(ix, p) = a.block(ix, p).adjoint();
    return out;
}

double max_abs_difference(const Symbol& a, const Symbol& b) {
    require_compatible(a, b);
    double worst = 0.0;
    const std::size_t slices = std::max(a.x_slices(), b.x_slices());
    for (std::size_t ix = 0; ix < slices; ++ix)
        for (std::size_t p = 0; p < a.num_points(); ++p)
            worst = std::max(worst, (a.block(ix, p) - b.block(ix, p)).cwiseAbs().maxCoeff());
    return worst;
}

double max_abs(const Symbol& a) {
    double worst = 0.0;
    for (const auto& v : a.raw()) worst = std::max(worst, std::abs(v));
    return worst;
}

// ---- backend-level symbols ---------------------------------------------

Symbol multiplier_symbol(const BackendPtr& backend, const std::function<cplx(double)>& f, double order) {
    Symbol s(backend, 0, order);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const auto spec = backend->spectrum(p);
        for (std::size_t k = 0; k < s.dim(); ++k) {
            const cplx v = f(spec[k]);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream os;
                os.precision(17);
                os << "multiplier is undefined at representation point " << p << " (eigenvalue index " << k
                   << ", nu = " << spec[k] << ")";
                fail(ErrorKind::domain, os.str());
            }
            s.at(0, p, k, k) = v;
        }
    }
    return s;
}

Symbol rockland_symbol(const BackendPtr& backend) {
    return multiplier_symbol(backend, [](double nu) { return cplx(nu, 0.0); }, backend->rockland_degree());
}

Symbol sobolev_weight(const BackendPtr& backend, cplx s) {
    const double nu = backend->rockland_degree();
    if (s == cplx{}) return Symbol::identity(backend);
    return multiplier_symbol(backend, [&](double t) { return weight_pow(1.0 + t, s / nu); }, s.real());
}

// ---- symbol calculus ---------------------------------------------------

int homogeneous_degree(const GroupBackend& backend, const MultiIndex& alpha) {
    const auto& w = backend.dilation_weights();
    require(alpha.size() <= w.size(), ErrorKind::shape, "multi-index longer than the group dimension");
    int deg = 0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        require(alpha[j] >= 0, ErrorKind::config, "multi-index entries must be non-negative");
        deg += w[j] * alpha[j];
    }
    return deg;
}

Symbol xi_derivative(const Symbol& a, const MultiIndex& alpha) {
    if (all_zero(alpha)) return a;
    require_abelian(a, "xi-differentiation");
    require(alpha.size() <= static_cast<std::size_t>(a.backend()->params().n), ErrorKind::shape,
            "multi-index longer than the group dimension");
    Symbol out = a;
    for (std::size_t axis = 0; axis < alpha.size(); ++axis)
        for (int k = 0; k < alpha[axis]; ++k) out = xi_derivative_once(out, static_cast<int>(axis));
    return out;
}

Symbol difference_op(const Symbol& a, const MultiIndex& alpha) {
    if (all_zero(alpha)) return a;
    require_abelian(a, "difference_op");
    const int order = total_order(alpha);
    static constexpr cplx i_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Symbol out = i_powers[order % 4] * xi_derivative(a, alpha);
    out.set_order(a.order() - a.rho() * homogeneous_degree(*a.backend(), alpha));
    return out;
}

Symbol x_derivative(const Symbol& a, const MultiIndex& beta) {
    if (all_zero(beta)) return a;
    Symbol out(a.backend(), 0, a.order() + a.delta() * homogeneous_degree(*a.backend(), beta), a.rho(), a.delta());
    if (a.is_invariant()) return out;  // zero symbol
    require(beta.size() == 1, ErrorKind::shape, "x-dependent symbols live on the one-dimensional cell");
    out = x_derivative_once(a, beta[0]);
    out.set_order(a.order() + a.delta() * beta[0]);
    return out;
}

double seminorm(const Symbol& a, const MultiIndex& alpha, const MultiIndex& beta, double gamma, double m) {
    const auto& backend = *a.backend();
    if (backend.kind() == GroupKind::heisenberg && !(all_zero(alpha) && all_zero(beta))) {
        fail(ErrorKind::unsupported, "seminorms with alpha or beta != 0 are not available on the Heisenberg backend");
    }
    const Symbol b = x_derivative(difference_op(a, alpha), beta);
    const double nu = backend.rockland_degree();
    const double left_exp =
        (a.rho() * homogeneous_degree(backend, alpha) - a.delta() * homogeneous_degree(backend, beta) - m - gamma) / nu;
    const double right_exp = gamma / nu;
    const std::size_t n = b.dim();

    std::vector<double> per_point(b.num_points(), 0.0);
    parallel_for(b.num_points(), [&](std::size_t p) {
        if (!b.in_interior(p)) return;
        const auto spec = backend.spectrum(p);
        Eigen::VectorXd wl(n), wr(n);
        for (std::size_t k = 0; k < n; ++k) {
            wl[k] = std::pow(1.0 + spec[k], left_exp);
            wr[k] = std::pow(1.0 + spec[k], right_exp);
        }
        double best = 0.0;
        for (std::size_t ix = 0; ix < b.x_slices(); ++ix) {
            if (n == 1) {
                best = std::max(best, wl[0] * std::abs(b.at(ix, p)) * wr[0]);
                continue;
            }
            const CMatrix weighted = wl.asDiagonal() * b.block(ix, p) * wr.asDiagonal();
            Eigen::JacobiSVD<CMatrix> svd(weighted);
            best = std::max(best, svd.singularValues()(0));
        }
        per_point[p] = best;
    });
    double sup = 0.0;
    for (double v : per_point) sup = std::max(sup, v);
    return sup;
}

namespace {

void enumerate_indices(int dim, int budget, const std::vector<int>& weights, MultiIndex& current, std::size_t pos,
                       std::vector<MultiIndex>& out) {
    if (pos == static_cast<std::size_t>(dim)) {
        out.push_back(current);
        return;
    }
    for (int v = 0; v * weights[pos] <= budget; ++v) {
        current[pos] = v;
        enumerate_indices(dim, budget - v * weights[pos], weights, current, pos + 1, out);
    }
    current[pos] = 0;
}

} // namespace

ClassReport check_class_membership(const SymbolFactory& factory, const BackendPtr& backend, double m, double rho,
                                   double delta, int k_max) {
    require(k_max >= 0, ErrorKind::config, "k_max must be >= 0");
    Symbol a = factory(backend);
    a.set_type(rho, delta);
    Symbol refined = factory(make_backend(doubled_extent(backend->params())));
    refined.set_type(rho, delta);

    std::vector<std::pair<MultiIndex, MultiIndex>> pairs;
    if (backend->kind() == GroupKind::heisenberg) {
        pairs.emplace_back(MultiIndex{}, MultiIndex{});
    } else {
        const int n = backend->params().n;
        const std::vector<int>& w = backend->dilation_weights();
        std::vector<MultiIndex> alphas;
        MultiIndex cur(n, 0);
        enumerate_indices(n, k_max, w, cur, 0, alphas);
        for (const auto& alpha : alphas) {
            const int rest = k_max - homogeneous_degree(*backend, alpha);
            if (a.is_invariant()) {
                pairs.emplace_back(alpha, MultiIndex(n, 0));
                continue;
            }
            for (int b = 0; b <= rest; ++b) pairs.emplace_back(alpha, MultiIndex{b});
        }
    }

    ClassReport report;
    for (const auto& [alpha, beta] : pairs) {
        ClassEntry e;
        e.alpha = alpha;
        e.beta = beta;
        e.value = seminorm(a, alpha, beta, 0.0, m);
        e.refined_value = seminorm(refined, alpha, beta, 0.0, m);
        report.norm = std::max(report.norm, e.value);
        report.refined_norm = std::max(report.refined_norm, e.refined_value);
        report.entries.push_back(std::move(e));
    }
    // Entries at finite-difference noise level (e.g. high differences of a
    // polynomial) carry no information about growth.
    const double noise = 1e-6 * std::max({report.norm, report.refined_norm, 1.0});
    for (auto& e : report.entries) {
        const double scale = std::max(std::abs(e.value), std::abs(e.refined_value));
        e.stable = std::isfinite(e.value) && std::isfinite(e.refined_value) &&
                   (scale < noise || std::abs(e.refined_value - e.value) < 0.1 * scale);
        report.stable = report.stable && e.stable;
    }
    return report;
}

FourierField apply_op(const Symbol& a, const FourierField& u) {
    require(a.is_invariant(), ErrorKind::unsupported,
            "Fourier-side application needs an invariant symbol; use the periodic-cell quantization for "
            "x-dependent abelian symbols");
    require(u.backend() && u.backend()->same_grid(*a.backend()) && u.dim() == a.dim(), ErrorKind::shape,
            "field and symbol live on different grids");
    FourierField out(u.backend());
    for (std::size_t p = 0; p < u.num_points(); ++p) out.block(p) = a.block(0, p) * u.block(p);
    return out;
}

namespace {

std::vector<std::size_t> frequency_points(const GroupBackend& backend, std::size_t n) {
    require(backend.kind() == GroupKind::abelian && backend.params().n == 1, ErrorKind::unsupported,
            "periodic-cell quantization needs the one-dimensional abelian backend");
    std::vector<std::size_t> idx(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(dft_frequency(j, n));
        const auto p = backend.find_point(std::span<const double>(&k, 1));
        if (!p) {
            fail(ErrorKind::shape, "integer frequency " + std::to_string(static_cast<long>(k)) +
                                       " is not on the xi-grid " + backend.describe());
        }
        idx[j] = *p;
    }
    return idx;
}

} // namespace

std::vector<cplx> apply_op(const Symbol& a, std::span<const cplx> u) {
    const std::size_t n = u.size();
    require(n >= 2, ErrorKind::shape, "periodic samples need at least 2 points");
    require(a.dim() == 1, ErrorKind::shape, "periodic quantization expects a scalar symbol");
    require(a.is_invariant() || a.nx() == n, ErrorKind::shape, "symbol x-grid does not match the samples");
    const auto points = frequency_points(*a.backend(), n);
    auto c = dft_forward(u);

    if (a.is_invariant()) {
        for (std::size_t j = 0; j < n; ++j) c[j] *= a.at(0, points[j]);
        return dft_inverse(c);
    }

    std::vector<cplx> out(n);
    const double two_pi = 2.0 * std::numbers::pi;
    parallel_for(n, [&](std::size_t ix) {
        cplx acc{};
        for (std::size_t j = 0; j < n; ++j) {
            if (c[j] == cplx{}) continue;
            const double k = static_cast<double>(dft_frequency(j, n));
            const double phase = two_pi * std::fmod(k * static_cast<double>(ix), static_cast<double>(n)) /
                                 static_cast<double>(n);
            acc += a.at(ix, points[j]) * c[j] * cplx(std::cos(phase), std::sin(phase));
        }
        out[ix] = acc;
    });
    return out;
}

Symbol extract_symbol(const BackendPtr& backend, std::size_t nx, const PeriodicOperator& applier, double order) {
    require(backend->kind() == GroupKind::abelian && backend->params().n == 1, ErrorKind::unsupported,
            "symbol extraction needs the one-dimensional abelian backend");
    require(nx >= 2, ErrorKind::config, "x-grid needs at least 2 points");

    // Linearity spot-check on two fixed pseudo-random inputs.
    {
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> g;
        std::vector<cplx> u(nx), v(nx), w(nx);
        const cplx c(0.7, -0.3);
        for (std::size_t j = 0; j < nx; ++j) {
            u[j] = {g(rng), g(rng)};
            v[j] = {g(rng), g(rng)};
            w[j] = u[j] + c * v[j];
        }
        const auto au = applier(u);
        const auto av = applier(v);
        const auto aw = applier(w);
        require(au.size() == nx && av.size() == nx && aw.size() == nx, ErrorKind::contract,
                "operator returned the wrong number of samples");
        double defect = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            defect = std::max(defect, std::abs(aw[j] - au[j] - c * av[j]));
            scale = std::max(scale, std::abs(au[j]) + std::abs(c * av[j]));
        }
        require(defect <= 1e-8 * std::max(scale, 1.0), ErrorKind::contract,
                "operator failed the linearity spot-check");
    }

    Symbol s(backend, nx, order);
    const double limit = static_cast<double>(nx) / 2.0;
    std::vector<cplx> e(nx);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const double xi = backend->xi(p);
        require(std::abs(xi - std::round(xi)) < 1e-9 && std::abs(xi) < limit, ErrorKind::shape,
                "symbol extraction needs integer xi-grid points below the Nyquist frequency of the x-grid");
        const long k = std::lround(xi);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * long(ix)) % long(nx)) / double(nx);
            e[ix] = {std::cos(phase), std::sin(phase)};
        }
        const auto ae = applier(e);
        require(ae.size() == nx, ErrorKind::contract, "operator returned the wrong number of samples");
        for (std::size_t ix = 0; ix < nx; ++ix) s.at(ix, p) = std::conj(e[ix]) * ae[ix];
    }
    return s;
}

Symbol compose(const Symbol& a, const Symbol& b, int n_terms) {
    require_compatible(a, b);
    require(n_terms >= 0, ErrorKind::config, "n_terms must be >= 0");
    if (b.is_invariant()) return pointwise_product(a, b);
    if (a.backend()->kind() == GroupKind::heisenberg)
        fail(ErrorKind::unsupported, "composition of x-dependent Heisenberg symbols is not implemented");

    Symbol result = pointwise_product(a, b);
    Symbol da = a;
    Symbol db = b;
    for (int g = 1; g <= n_terms; ++g) {
        da = xi_derivative(da, {1});
        db = cplx(0.0, -1.0) * x_derivative(db, {1});  // D_x = -i d_x
        result = result + (1.0 / factorial(g)) * pointwise_product(da, db);
    }
    result.set_order(a.order() + b.order());
    return result;
}

Symbol adjoint_symbol(const Symbol& a, int n_terms) {
    require(n_terms >= 0, ErrorKind::config, "n_terms must be >= 0");
    Symbol star = pointwise_adjoint(a);
    if (a.is_invariant()) return star;

    Symbol result = star;
    Symbol term = star;
    for (int g = 1; g <= n_terms; ++g) {
        term = cplx(0.0, -1.0) * x_derivative(xi_derivative(term, {1}), {1});
        result = result + (1.0 / factorial(g)) * term;
    }
    result.set_order(a.order());
    return result;
}

// ---- periodic-cell helpers ---------------------------------------------

long dft_frequency(std::size_t j, std::size_t n) {
    return j < (n + 1) / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

std::vector<cplx> dft_forward(std::span<const cplx> u) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(u.begin(), u.end());
    std::vector<cplx> out;
    fft.fwd(out, in);
    const double scale = 1.0 / static_cast<double>(u.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> dft_inverse(std::span<const cplx> c) {
    Eigen::FFT<double> fft;
    std::vector<cplx> in(c.begin(), c.end());
    std::vector<cplx> out;
    fft.inv(out, in);
    const double scale = static_cast<double>(c.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> periodic_derivative(std::span<const cplx> u, int order) {
    if (order == 0) return {u.begin(), u.end()};
    const std::size_t n = u.size();
    auto c = dft_forward(u);
    for (std::size_t j = 0; j < n; ++j) {
        if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
            c[j] = 0.0;
            continue;
        }
        const cplx ik(0.0, static_cast<double>(dft_frequency(j, n)));
        cplx factor = 1.0;
        for (int r = 0; r < order; ++r) factor *= ik;
        c[j] *= factor;
    }
    return dft_inverse(c);
}

} // namespace pdo
