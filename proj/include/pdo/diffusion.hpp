#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

// Invariant generator: K(t) acts on the Rockland eigenmode with eigenvalue
// nu by multiplication with m(t, nu).
struct MultiplierFamily {
    std::string name;
    std::function<cplx(double t, double nu)> m;
    bool time_constant = true;
};

// Cauchy problem dv/dt = K(t) v + f, v(0) = u0 on [0, T].
//
// Invariant problems fill `multiplier`, `u0` and optionally `forcing`.
// Periodic problems on the abelian cell fill `symbol_family`, `nx`,
// `u0_samples` and optionally `forcing_samples`.
struct EvolutionProblem {
    BackendPtr backend;
    double order = 2.0;  // m, the order of K
    double s = 0.0;      // Sobolev index of the data
    double T = 1.0;
    int n_steps = 100;   // output samples (and fixed steps for the invariant solver)

    // dissipativity: -Re sigma_K >= c0 pi(M)^m - c2
    double c0 = 0.0;
    double c2 = 0.0;

    std::optional<MultiplierFamily> multiplier;
    FourierField u0;
    std::function<FourierField(double)> forcing;

    std::function<Symbol(double)> symbol_family;
    bool symbol_time_constant = true;
    std::size_t nx = 0;
    std::vector<cplx> u0_samples;
    std::function<std::vector<cplx>(double)> forcing_samples;

    // adaptive control of the periodic solver
    double rtol = 1e-10;
    double atol = 1e-13;
};

struct SolutionTrace {
    bool invariant = true;
    std::vector<double> times;
    std::vector<FourierField> fields;              // invariant problems
    std::vector<std::vector<cplx>> samples;        // periodic problems
    std::vector<double> l2_norms;
    std::vector<double> hs_norms;                  // H^{m/2}
    std::vector<double> forcing_norms;             // ||f(t)||_{L^2}
    int accepted_steps = 0;
    int rejected_steps = 0;
    EvolutionProblem problem;
};

SolutionTrace solve_invariant(const EvolutionProblem& problem);
SolutionTrace solve_abelian(const EvolutionProblem& problem);

struct EnergyReport {
    double C = 0.0;        // fitted constants of ||v(t)||^2 <= C ||v0||^2 + C' int_0^t ||f||^2
    double C_prime = 0.0;
    bool fit_feasible = false;
    bool unit_constants_hold = false;  // (C, C') = (1, 0) satisfies the bound
    double c1 = 0.0;       // d/dt ||v||^2 <= c1 ||v||^2 + c2 ||f||^2 (discrete)
    double c2 = 0.0;
    bool differential_form_holds = false;
    bool gronwall_holds = false;
    bool forward_bound_holds = false;  // ||v(t)|| <= e^{c2 t}(||u0|| + int ||f||), c2 from the problem
    std::vector<double> times;
    std::vector<double> lhs;          // ||v(t)||^2
    std::vector<double> forcing_integral;
    double conjugation_residual = 0.0;  // sobolev_energy_check only
    bool conjugation_holds = true;
};

EnergyReport energy_check(const SolutionTrace& trace);
// Same fit in H^s; re-solves with (1 + R)^{s/nu}-weighted data to check the
// conjugation identity (invariant traces only).
EnergyReport sobolev_energy_check(const SolutionTrace& trace, double s);

// Periodic-cell norms of samples u_j: 2 pi sum_k (1 + k^2)^{s} |c_k|^2.
double periodic_sobolev_norm(std::span<const cplx> u, double s);

} // namespace pdo
