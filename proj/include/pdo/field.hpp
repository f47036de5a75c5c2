#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pdo/backend.hpp"

namespace pdo {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CMap = Eigen::Map<CMatrix>;
using ConstCMap = Eigen::Map<const CMatrix>;

// Fourier data u^(pi): one N x N matrix per representation point (a 1 x 1
// block on the abelian group). Rows are indexed by the Rockland eigenbasis,
// so pi(M)^s acts on the left by scaling row i with (1 + nu_ii)^{s/nu}.
class FourierField {
public:
    FourierField() = default;
    explicit FourierField(BackendPtr backend);

    static FourierField from_function(BackendPtr backend,
                                      const std::function<cplx(std::size_t point, std::size_t i, std::size_t j)>& f);

    const BackendPtr& backend() const noexcept { return backend_; }
    std::size_t num_points() const noexcept { return points_; }
    std::size_t dim() const noexcept { return dim_; }

    CMap block(std::size_t point) { return {data_.data() + point * dim_ * dim_, long(dim_), long(dim_)}; }
    ConstCMap block(std::size_t point) const {
        return {data_.data() + point * dim_ * dim_, long(dim_), long(dim_)};
    }
    cplx& at(std::size_t point, std::size_t i, std::size_t j) { return data_[point * dim_ * dim_ + j * dim_ + i]; }
    cplx at(std::size_t point, std::size_t i, std::size_t j) const { return data_[point * dim_ * dim_ + j * dim_ + i]; }

    std::vector<cplx>& raw() noexcept { return data_; }
    const std::vector<cplx>& raw() const noexcept { return data_; }

    FourierField& operator+=(const FourierField& other);
    FourierField& operator-=(const FourierField& other);
    FourierField& operator*=(cplx c);

    bool is_finite() const;

private:
    BackendPtr backend_;
    std::size_t points_ = 0;
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(cplx c, FourierField a);

void require_same_grid(const FourierField& a, const FourierField& b);

// sum_p weight_p Tr(w(p)^* u(p)); conjugate-linear in w.
cplx plancherel_inner(const GroupBackend& backend, const FourierField& u, const FourierField& w);

// sqrt(sum_p weight_p sum_ij (1 + nu_ii)^{2s/nu} |u_ij|^2)
double sobolev_norm(const GroupBackend& backend, const FourierField& u, double s);

// Row-scaling by (1 + nu_ii)^{s/nu}, i.e. pi(M)^s u for a real or complex s.
FourierField apply_sobolev_weight(const FourierField& u, cplx s);

} // namespace pdo
