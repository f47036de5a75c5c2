#include "pdo/field.hpp"

#include <cmath>

#include "pdo/error.hpp"

namespace pdo {

FourierField::FourierField(BackendPtr backend)
    : backend_(std::move(backend)),
      points_(backend_->num_points()),
      dim_(backend_->truncation()),
      data_(points_ * dim_ * dim_, cplx{}) {}

FourierField FourierField::from_function(
    BackendPtr backend, const std::function<cplx(std::size_t, std::size_t, std::size_t)>& f) {
    FourierField u(std::move(backend));
    for (std::size_t p = 0; p < u.points_; ++p)
        for (std::size_t j = 0; j < u.dim_; ++j)
            for (std::size_t i = 0; i < u.dim_; ++i) u.at(p, i, j) = f(p, i, j);
    return u;
}

void require_same_grid(const FourierField& a, const FourierField& b) {
    require(a.backend() && b.backend() && a.backend()->same_grid(*b.backend()) && a.dim() == b.dim(),
            ErrorKind::shape, "Fourier fields live on different grids");
}

FourierField& FourierField::operator+=(const FourierField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

FourierField& FourierField::operator*=(cplx c) {
    for (auto& v : data_) v *= c;
    return *this;
}

bool FourierField::is_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(cplx c, FourierField a) { return a *= c; }

namespace {

void require_on_backend(const GroupBackend& backend, const FourierField& u) {
    require(u.backend() && u.backend()->same_grid(backend) && u.dim() == backend.truncation(),
            ErrorKind::shape, "Fourier field does not match the backend grid");
}

} // namespace

cplx plancherel_inner(const GroupBackend& backend, const FourierField& u, const FourierField& w) {
    require_on_backend(backend, u);
    require_on_backend(backend, w);
    const std::size_t n = u.dim();
    cplx total{};
    for (std::size_t p = 0; p < u.num_points(); ++p) {
        cplx trace{};
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) trace += std::conj(w.at(p, i, j)) * u.at(p, i, j);
        total += backend.weight(p) * trace;
    }
    return total;
}

double sobolev_norm(const GroupBackend& backend, const FourierField& u, double s) {
    require_on_backend(backend, u);
    const double exponent = 2.0 * s / backend.rockland_degree();
    const std::size_t n = u.dim();
    double total = 0.0;
    for (std::size_t p = 0; p < u.num_points(); ++p) {
        const auto spec = backend.spectrum(p);
        double point_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = s == 0.0 ? 1.0 : std::pow(1.0 + spec[i], exponent);
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += std::norm(u.at(p, i, j));
            point_sum += w * row;
        }
        total += backend.weight(p) * point_sum;
    }
    return std::sqrt(total);
}

FourierField apply_sobolev_weight(const FourierField& u, cplx s) {
    FourierField out = u;
    const auto& backend = *u.backend();
    const double nu = backend.rockland_degree();
    for (std::size_t p = 0; p < u.num_points(); ++p) {
        const auto spec = backend.spectrum(p);
        for (std::size_t i = 0; i < u.dim(); ++i) {
            const cplx w = std::pow(cplx(1.0 + spec[i], 0.0), s / nu);
            for (std::size_t j = 0; j < u.dim(); ++j) out.at(p, i, j) *= w;
        }
    }
    return out;
}

} // namespace pdo
