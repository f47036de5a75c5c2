#pragma once

#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

// Samples of a curve Lambda in C over which suprema are taken. The built-in
// kinds use a logarithmic ladder of magnitudes.
struct CurveSpec {
    enum class Kind { negative_real_axis, ray_pair, custom };

    Kind kind = Kind::negative_real_axis;
    double theta = 0.0;       // ray_pair: rays at angles pi -/+ theta
    int per_decade = 60;
    double r_min = 1e-3;
    double r_max = 1e6;
    std::vector<cplx> samples;

    static CurveSpec negative_real_axis(int per_decade = 60, double r_min = 1e-3, double r_max = 1e6);
    static CurveSpec ray_pair(double theta, int per_decade = 60, double r_min = 1e-3, double r_max = 1e6);
    static CurveSpec custom(std::vector<cplx> points);

    // Same curve with twice the ladder density (custom curves are unchanged).
    CurveSpec doubled() const;
};

struct EllipticityReport {
    bool is_elliptic = false;
    double m0 = 0.0;
    double lambda_spec = 0.0;
    std::vector<double> gammas;
    std::vector<double> lower_bounds;  // min smallest singular value per gamma
    std::vector<double> sup_values;    // 1 / lower_bounds (inf when not elliptic)
    std::size_t worst_point = 0;
    std::size_t worst_x = 0;
};

EllipticityReport is_elliptic(const Symbol& a, double m0, double lambda_spec, const std::vector<double>& gammas);

// Smallest singular value accepted before inverting a - lambda.
inline constexpr double singular_threshold = 1e-12;

// (a(x, pi) - lambda)^{-1} at every point.
Symbol resolvent(const Symbol& a, cplx lambda);

struct CurveSupReport {
    double value = 0.0;           // sup over curve samples and grid
    double refined_value = 0.0;   // same on the doubled ladder
    bool stable = false;          // relative change < stability_tolerance
    double stability_tolerance = 0.05;
    std::vector<double> lambda_abs;     // per-sample |lambda|
    std::vector<double> sample_sup;     // per-sample sup over the grid
    cplx worst_lambda{};
};

// sup_{lambda, x, pi} || (|lambda|^{1/m} + pi(M))^m (a - lambda)^{-1} ||_op
CurveSupReport parameter_ellipticity_report(const Symbol& a, const CurveSpec& curve, double m);

// sup || (|lambda|^{1/m} + pi(M))^{m(k+1)} pi(M)^{rho[alpha] - delta[beta]}
//        d_lambda^k X^beta Delta^alpha R_lambda ||_op,
// with d_lambda^k R_lambda = k! R_lambda^{k+1}.
CurveSupReport resolvent_estimate_check(const Symbol& a, const CurveSpec& curve, double m, int k,
                                        const MultiIndex& alpha = {}, const MultiIndex& beta = {});

// k! R^{k+1}, the k-th lambda-derivative of the resolvent.
Symbol resolvent_derivative(const Symbol& a, cplx lambda, int k);

// tau^(N) = sum_{j <= N} tau_j with tau_0 = sigma^{-1} E(Lambda, inf) and
// tau_j = -tau_0 sum_{k<j} sum_{|g|=j-k} (1/g!) (d_xi^g sigma)(D_x^g tau_k).
Symbol parametrix(const Symbol& sigma, int n_corrections, double lambda_spec);

struct ResidualStudy {
    std::vector<double> cutoffs;
    std::vector<double> residuals;
    double slope = 0.0;
};

// ||(Op(sigma) Op(tau^(N)) - I) u_L|| / ||u_L|| for test functions u_L
// concentrated at integer frequency L, plus the fitted log-log slope.
ResidualStudy parametrix_residual_study(const Symbol& sigma, int n_corrections, double lambda_spec,
                                        const std::vector<double>& frequencies, int band = 2);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace pdo
