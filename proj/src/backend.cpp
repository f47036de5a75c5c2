#include "pdo/backend.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pdo/error.hpp"

namespace pdo {

namespace {

constexpr std::size_t max_grid_points = 10'000'000;

void validate(const BackendParams& p) {
    if (p.kind == GroupKind::abelian) {
        require(p.n >= 1, ErrorKind::config, "n must be >= 1");
        require(std::isfinite(p.xi_max) && p.xi_max > 0, ErrorKind::config, "xi_max must be > 0");
        require(p.n_xi >= 2, ErrorKind::config, "n_xi must be >= 2");
        double total = std::pow(static_cast<double>(p.n_xi), p.n);
        require(total <= static_cast<double>(max_grid_points), ErrorKind::config,
                "n_xi^n exceeds the grid size limit");
    } else {
        require(std::isfinite(p.lambda_min) && p.lambda_min > 0, ErrorKind::config,
                "lambda_min must be > 0 (lambda = 0 is the degenerate representation)");
        require(std::isfinite(p.lambda_max) && p.lambda_max > p.lambda_min, ErrorKind::config,
                "lambda_max must exceed lambda_min");
        require(p.n_lambda >= 2, ErrorKind::config, "n_lambda must be >= 2");
        require(p.hermite_dim >= 1, ErrorKind::config, "hermite_dim must be >= 1");
    }
}

} // namespace

BackendPtr make_backend(const BackendParams& params) {
    validate(params);
    std::shared_ptr<GroupBackend> b(new GroupBackend(params));
    constexpr double two_pi = 2.0 * std::numbers::pi;

    if (params.kind == GroupKind::abelian) {
        const int n = params.n;
        const int m = params.n_xi;
        b->dilation_weights_.assign(n, 1);
        b->homogeneous_dimension_ = n;
        b->truncation_ = 1;
        b->xi_spacing_ = 2.0 * params.xi_max / (m - 1);
        const double w = std::pow(b->xi_spacing_ / two_pi, n);

        std::size_t total = 1;
        for (int d = 0; d < n; ++d) total *= static_cast<std::size_t>(m);
        b->grid_.points.reserve(total);
        b->grid_.weights.assign(total, w);
        b->spectra_.reserve(total);
        std::vector<int> idx(n, 0);
        for (std::size_t k = 0; k < total; ++k) {
            std::vector<double> xi(n);
            double r2 = 0.0;
            for (int d = 0; d < n; ++d) {
                xi[d] = -params.xi_max + idx[d] * b->xi_spacing_;
                r2 += xi[d] * xi[d];
            }
            b->grid_.points.push_back(std::move(xi));
            b->spectra_.push_back(r2);
            for (int d = n - 1; d >= 0; --d) {
                if (++idx[d] < m) break;
                idx[d] = 0;
            }
        }
    } else {
        b->dilation_weights_ = {1, 1, 2};
        b->homogeneous_dimension_ = 4;
        b->truncation_ = static_cast<std::size_t>(params.hermite_dim);
        const int m = params.n_lambda;
        const double dl = (params.lambda_max - params.lambda_min) / (m - 1);
        b->xi_spacing_ = dl;
        std::vector<double> lambdas;
        for (int j = m - 1; j >= 0; --j) lambdas.push_back(-(params.lambda_min + j * dl));
        for (int j = 0; j < m; ++j) lambdas.push_back(params.lambda_min + j * dl);
        for (double l : lambdas) {
            b->grid_.points.push_back({l});
            b->grid_.weights.push_back(std::abs(l) * dl / (two_pi * two_pi));
            for (std::size_t k = 0; k < b->truncation_; ++k)
                b->spectra_.push_back(std::abs(l) * (2.0 * static_cast<double>(k) + 1.0));
        }
    }
    for (double e : b->spectra_) b->max_eigenvalue_ = std::max(b->max_eigenvalue_, e);
    return b;
}

BackendPtr make_abelian_backend(int n, double xi_max, int n_xi) {
    BackendParams p;
    p.kind = GroupKind::abelian;
    p.n = n;
    p.xi_max = xi_max;
    p.n_xi = n_xi;
    return make_backend(p);
}

BackendPtr make_heisenberg_backend(double lambda_min, double lambda_max, int n_lambda, int hermite_dim) {
    BackendParams p;
    p.kind = GroupKind::heisenberg;
    p.lambda_min = lambda_min;
    p.lambda_max = lambda_max;
    p.n_lambda = n_lambda;
    p.hermite_dim = hermite_dim;
    return make_backend(p);
}

BackendParams doubled_extent(const BackendParams& params) {
    BackendParams out = params;
    if (params.kind == GroupKind::abelian) {
        out.xi_max = 2.0 * params.xi_max;
        out.n_xi = 2 * params.n_xi - 1;
    } else {
        const double dl = (params.lambda_max - params.lambda_min) / (params.n_lambda - 1);
        out.lambda_max = params.lambda_min + 2.0 * (params.lambda_max - params.lambda_min);
        out.n_lambda = static_cast<int>(std::lround((out.lambda_max - out.lambda_min) / dl)) + 1;
        out.hermite_dim = 2 * params.hermite_dim;
    }
    return out;
}

std::span<const double> GroupBackend::spectrum(std::size_t point) const {
    require(point < num_points(), ErrorKind::shape, "representation point out of range");
    return {spectra_.data() + point * truncation_, truncation_};
}

std::size_t GroupBackend::axis_stride(int axis) const {
    std::size_t stride = 1;
    for (int d = params_.n - 1; d > axis; --d) stride *= static_cast<std::size_t>(params_.n_xi);
    return stride;
}

std::size_t GroupBackend::axis_index(std::size_t point, int axis) const {
    return (point / axis_stride(axis)) % static_cast<std::size_t>(params_.n_xi);
}

std::optional<std::size_t> GroupBackend::find_point(std::span<const double> coords, double tol) const {
    const std::size_t dim = kind() == GroupKind::abelian ? static_cast<std::size_t>(params_.n) : 1;
    if (coords.size() != dim) return std::nullopt;
    if (kind() == GroupKind::abelian) {
        std::size_t idx = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double f = (coords[d] + params_.xi_max) / xi_spacing_;
            const long r = std::lround(f);
            if (r < 0 || r >= params_.n_xi || std::abs(f - static_cast<double>(r)) * xi_spacing_ > tol)
                return std::nullopt;
            idx = idx * static_cast<std::size_t>(params_.n_xi) + static_cast<std::size_t>(r);
        }
        return idx;
    }
    for (std::size_t p = 0; p < num_points(); ++p)
        if (std::abs(grid_.points[p][0] - coords[0]) <= tol) return p;
    return std::nullopt;
}

bool GroupBackend::same_grid(const GroupBackend& other) const {
    if (this == &other) return true;
    const auto& a = params_;
    const auto& b = other.params_;
    if (a.kind != b.kind) return false;
    if (a.kind == GroupKind::abelian)
        return a.n == b.n && a.xi_max == b.xi_max && a.n_xi == b.n_xi;
    return a.lambda_min == b.lambda_min && a.lambda_max == b.lambda_max &&
           a.n_lambda == b.n_lambda && a.hermite_dim == b.hermite_dim;
}

std::string GroupBackend::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind() == GroupKind::abelian)
        os << "abelian(n=" << params_.n << ", xi_max=" << params_.xi_max << ", n_xi=" << params_.n_xi << ")";
    else
        os << "heisenberg(lambda_min=" << params_.lambda_min << ", lambda_max=" << params_.lambda_max
           << ", n_lambda=" << params_.n_lambda << ", N=" << params_.hermite_dim << ")";
    return os.str();
}

} // namespace pdo
