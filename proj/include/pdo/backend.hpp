#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdo {

using cplx = std::complex<double>;

enum class GroupKind { abelian, heisenberg };

// Construction parameters; also what gets echoed into report headers.
struct BackendParams {
    GroupKind kind = GroupKind::abelian;
    int n = 1;                 // abelian dimension
    double xi_max = 10.0;
    int n_xi = 65;             // points per axis
    double lambda_min = 0.5;
    double lambda_max = 4.0;
    int n_lambda = 8;          // points per half-line
    int hermite_dim = 8;       // Hermite truncation N
};

// Quadrature over the unitary dual. Abelian points are xi in R^n in
// row-major order (last axis fastest); Heisenberg points are lambda values,
// negative half first, each half ascending.
struct RepGrid {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
};

class GroupBackend {
public:
    GroupKind kind() const noexcept { return params_.kind; }
    const BackendParams& params() const noexcept { return params_; }

    const std::vector<int>& dilation_weights() const noexcept { return dilation_weights_; }
    int homogeneous_dimension() const noexcept { return homogeneous_dimension_; }
    int rockland_degree() const noexcept { return 2; }

    // Matrix dimension at every representation point (1 on the abelian group).
    std::size_t truncation() const noexcept { return truncation_; }
    std::size_t num_points() const noexcept { return grid_.points.size(); }
    const RepGrid& grid() const noexcept { return grid_; }
    double weight(std::size_t point) const { return grid_.weights.at(point); }

    // Eigenvalues of pi(R) at a point, ascending.
    std::span<const double> spectrum(std::size_t point) const;
    double max_eigenvalue() const noexcept { return max_eigenvalue_; }

    // Abelian grid geometry.
    int axis_points() const noexcept { return params_.n_xi; }
    double xi_spacing() const noexcept { return xi_spacing_; }
    double xi(std::size_t point, int axis = 0) const { return grid_.points.at(point).at(axis); }
    std::size_t axis_stride(int axis) const;
    std::size_t axis_index(std::size_t point, int axis) const;

    double lambda(std::size_t point) const { return grid_.points.at(point).at(0); }

    // Index of the grid point whose coordinates match within tol.
    std::optional<std::size_t> find_point(std::span<const double> coords, double tol = 1e-9) const;

    bool same_grid(const GroupBackend& other) const;
    std::string describe() const;

private:
    friend std::shared_ptr<const GroupBackend> make_backend(const BackendParams&);
    explicit GroupBackend(const BackendParams& p) : params_(p) {}

    BackendParams params_;
    std::vector<int> dilation_weights_;
    int homogeneous_dimension_ = 0;
    std::size_t truncation_ = 1;
    double xi_spacing_ = 0.0;
    RepGrid grid_;
    std::vector<double> spectra_;  // num_points * truncation
    double max_eigenvalue_ = 0.0;
};

using BackendPtr = std::shared_ptr<const GroupBackend>;

BackendPtr make_backend(const BackendParams& params);
BackendPtr make_abelian_backend(int n, double xi_max, int n_xi);
BackendPtr make_heisenberg_backend(double lambda_min, double lambda_max, int n_lambda, int hermite_dim);

// Grid with twice the extent (and, for Heisenberg, twice the truncation) at
// the same spacing; used by the refinement-stability checks.
BackendParams doubled_extent(const BackendParams& params);

} // namespace pdo
