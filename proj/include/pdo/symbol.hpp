#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pdo/field.hpp"

namespace pdo {

using MultiIndex = std::vector<int>;

// A field of N x N matrices over the representation grid. On the abelian
// group (n = 1) a symbol may additionally depend on x in the periodic cell
// [0, 2pi), sampled at nx equispaced points; nx == 0 marks an invariant
// (x-independent) symbol.
class Symbol {
public:
    Symbol() = default;
    Symbol(BackendPtr backend, std::size_t nx, double order, double rho = 1.0, double delta = 0.0);

    const BackendPtr& backend() const noexcept { return backend_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t x_slices() const noexcept { return nx_ == 0 ? 1 : nx_; }
    bool is_invariant() const noexcept { return nx_ == 0; }
    std::size_t num_points() const noexcept { return points_; }
    std::size_t dim() const noexcept { return dim_; }
    double x(std::size_t ix) const;

    double order() const noexcept { return order_; }
    double rho() const noexcept { return rho_; }
    double delta() const noexcept { return delta_; }
    void set_order(double m) noexcept { order_ = m; }
    void set_type(double rho, double delta);

    // Number of xi-grid layers at each boundary where finite-difference
    // stencils were shifted; such points are left out of every supremum.
    int fd_margin() const noexcept { return fd_margin_; }
    void set_fd_margin(int m) noexcept { fd_margin_ = m; }
    bool in_interior(std::size_t point) const;

    CMap block(std::size_t ix, std::size_t point) {
        return {data_.data() + offset(ix, point), long(dim_), long(dim_)};
    }
    ConstCMap block(std::size_t ix, std::size_t point) const {
        return {data_.data() + offset(ix, point), long(dim_), long(dim_)};
    }
    cplx& at(std::size_t ix, std::size_t point, std::size_t i = 0, std::size_t j = 0) {
        return data_[offset(ix, point) + j * dim_ + i];
    }
    cplx at(std::size_t ix, std::size_t point, std::size_t i = 0, std::size_t j = 0) const {
        return data_[offset(ix, point) + j * dim_ + i];
    }
    std::vector<cplx>& raw() noexcept { return data_; }
    const std::vector<cplx>& raw() const noexcept { return data_; }

    bool is_finite() const;

    static Symbol identity(BackendPtr backend);
    static Symbol invariant(BackendPtr backend, const std::function<CMatrix(std::size_t point)>& f, double order);
    // Scalar abelian (n = 1) symbol sampled from a(x, xi).
    static Symbol x_dependent(BackendPtr backend, std::size_t nx,
                              const std::function<cplx(double x, double xi)>& f, double order);

private:
    std::size_t offset(std::size_t ix, std::size_t point) const {
        return ((nx_ == 0 ? 0 : ix) * points_ + point) * dim_ * dim_;
    }

    BackendPtr backend_;
    std::size_t nx_ = 0;
    std::size_t points_ = 0;
    std::size_t dim_ = 0;
    double order_ = 0.0;
    double rho_ = 1.0;
    double delta_ = 0.0;
    int fd_margin_ = 0;
    std::vector<cplx> data_;
};

// ---- pointwise algebra -------------------------------------------------

void require_compatible(const Symbol& a, const Symbol& b);
Symbol operator+(const Symbol& a, const Symbol& b);
Symbol operator-(const Symbol& a, const Symbol& b);
Symbol operator*(cplx c, const Symbol& a);
// Per-point matrix product a(x, pi) b(x, pi); declared orders add.
Symbol pointwise_product(const Symbol& a, const Symbol& b);
Symbol pointwise_adjoint(const Symbol& a);
// Largest entry-wise modulus of a - b over all points.
double max_abs_difference(const Symbol& a, const Symbol& b);
double max_abs(const Symbol& a);

// ---- backend-level symbols ---------------------------------------------

// pi(R): diag(nu_kk(pi)); order nu, type (1, 0).
Symbol rockland_symbol(const BackendPtr& backend);
// pi(M)^s = (1 + pi(R))^{s/nu}; order Re(s).
Symbol sobolev_weight(const BackendPtr& backend, cplx s);
// f(pi(R)) for a scalar f on [0, inf).
Symbol multiplier_symbol(const BackendPtr& backend, const std::function<cplx(double)>& f, double order = 0.0);

// ---- symbol calculus ---------------------------------------------------

int homogeneous_degree(const GroupBackend& backend, const MultiIndex& alpha);

// Delta^alpha a = i^{|alpha|} d_xi^alpha a by 6th-order finite differences
// (abelian only).
Symbol difference_op(const Symbol& a, const MultiIndex& alpha);
// Plain d_xi^alpha a, the building block of difference_op.
Symbol xi_derivative(const Symbol& a, const MultiIndex& alpha);
// d_x^beta a by spectral differentiation on the periodic cell.
Symbol x_derivative(const Symbol& a, const MultiIndex& beta);

double seminorm(const Symbol& a, const MultiIndex& alpha, const MultiIndex& beta, double gamma, double m);

struct ClassEntry {
    MultiIndex alpha;
    MultiIndex beta;
    double value = 0.0;
    double refined_value = 0.0;
    bool stable = true;
};

struct ClassReport {
    std::vector<ClassEntry> entries;
    double norm = 0.0;          // max over the table
    double refined_norm = 0.0;
    bool stable = true;         // every entry changes < 10% under doubling
};

using SymbolFactory = std::function<Symbol(const BackendPtr&)>;

// Tabulates p_{alpha,beta,0,m} for [alpha] + [beta] <= k_max on the given
// backend and on a grid of doubled extent.
ClassReport check_class_membership(const SymbolFactory& factory, const BackendPtr& backend, double m,
                                   double rho, double delta, int k_max);

// Op(a) on Fourier data: left multiplication per point (invariant a only).
FourierField apply_op(const Symbol& a, const FourierField& u);
// Kohn-Nirenberg quantization on the periodic cell: u holds samples at
// x_j = 2 pi j / n; a must be invariant or carry nx == n.
std::vector<cplx> apply_op(const Symbol& a, std::span<const cplx> u);

using PeriodicOperator = std::function<std::vector<cplx>(std::span<const cplx>)>;

// sigma(x, xi) = e^{-i x xi} (A e^{i xi .})(x) on every grid point of an
// integer-lattice abelian backend.
Symbol extract_symbol(const BackendPtr& backend, std::size_t nx, const PeriodicOperator& applier,
                      double order = 0.0);

// Asymptotic composition sum_{|g| <= n_terms} (1/g!) d_xi^g a D_x^g b.
Symbol compose(const Symbol& a, const Symbol& b, int n_terms);
// Asymptotic adjoint sum_{|g| <= n_terms} (1/g!) d_xi^g D_x^g a^*.
Symbol adjoint_symbol(const Symbol& a, int n_terms);

// ---- periodic-cell helpers ---------------------------------------------

// Integer frequency of DFT bin j for an n-point grid.
long dft_frequency(std::size_t j, std::size_t n);
std::vector<cplx> dft_forward(std::span<const cplx> u);   // c_k = (1/n) sum u_j e^{-ikx_j}
std::vector<cplx> dft_inverse(std::span<const cplx> c);   // u_j = sum c_k e^{ikx_j}
std::vector<cplx> periodic_derivative(std::span<const cplx> u, int order);

} // namespace pdo
