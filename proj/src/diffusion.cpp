#include "pdo/diffusion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pdo/error.hpp"
#include "pdo/parallel.hpp"
#include "pdo/quadrature.hpp"

namespace pdo {

namespace {

constexpr double overflow_threshold = 1e150;

std::vector<double> output_times(const EvolutionProblem& pb) {
    require(pb.T > 0.0, ErrorKind::config, "horizon T must be > 0");
    require(pb.n_steps >= 1, ErrorKind::config, "n_steps must be >= 1");
    std::vector<double> t(pb.n_steps + 1);
    for (int j = 0; j <= pb.n_steps; ++j) t[j] = pb.T * static_cast<double>(j) / pb.n_steps;
    t.back() = pb.T;
    return t;
}

void validate_multiplier(const EvolutionProblem& pb, const std::vector<double>& times) {
    const auto& backend = *pb.backend;
    const double nu = backend.rockland_degree();
    for (double t : times) {
        for (std::size_t p = 0; p < backend.num_points(); ++p) {
            for (double ev : backend.spectrum(p)) {
                const cplx mu = pb.multiplier->m(t, ev);
                if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
                    std::ostringstream os;
                    os << "multiplier '" << pb.multiplier->name << "' is undefined at nu = " << ev << ", t = " << t;
                    fail(ErrorKind::domain, os.str());
                }
                const double bound = pb.c0 * std::pow(1.0 + ev, pb.order / nu) - pb.c2;
                if (-mu.real() < bound - 1e-12 * std::max(1.0, std::abs(mu))) {
                    std::ostringstream os;
                    os << "generator violates the dissipativity convention -Re K >= c0 pi(M)^m - c2 at nu = " << ev
                       << ", t = " << t << " (Re K = " << mu.real() << ", c0 = " << pb.c0 << ", c2 = " << pb.c2
                       << ")";
                    fail(ErrorKind::contract, os.str());
                }
            }
        }
    }
}

void record_norms(SolutionTrace& tr, double order) {
    const auto& backend = *tr.problem.backend;
    for (const auto& f : tr.fields) {
        tr.l2_norms.push_back(sobolev_norm(backend, f, 0.0));
        tr.hs_norms.push_back(sobolev_norm(backend, f, order / 2.0));
    }
}

} // namespace

double periodic_sobolev_norm(std::span<const cplx> u, double s) {
    const auto c = dft_forward(u);
    const std::size_t n = u.size();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(dft_frequency(j, n));
        total += (s == 0.0 ? 1.0 : std::pow(1.0 + k * k, s)) * std::norm(c[j]);
    }
    return std::sqrt(2.0 * std::numbers::pi * total);
}

SolutionTrace solve_invariant(const EvolutionProblem& pb) {
    require(pb.backend != nullptr, ErrorKind::config, "evolution problem needs a backend");
    require(pb.multiplier.has_value(), ErrorKind::contract, "solve_invariant needs an invariant multiplier generator");
    require(pb.u0.backend() && pb.u0.backend()->same_grid(*pb.backend), ErrorKind::shape,
            "initial data does not live on the backend grid");
    const auto times = output_times(pb);
    validate_multiplier(pb, times);

    const auto& backend = *pb.backend;
    const int steps = pb.n_steps;
    const bool forced = static_cast<bool>(pb.forcing);
    const auto& mult = *pb.multiplier;
    const GaussRule rule = mult.time_constant ? gauss_legendre(5) : gauss_legendre(2);
    const std::size_t q = rule.nodes.size();

    // forcing at the quadrature nodes of every step
    std::vector<FourierField> fnodes;
    if (forced) {
        fnodes.reserve(steps * q);
        for (int n = 0; n < steps; ++n) {
            const double h = times[n + 1] - times[n];
            for (std::size_t k = 0; k < q; ++k) {
                FourierField f = pb.forcing(times[n] + 0.5 * h * (1.0 + rule.nodes[k]));
                require(f.backend() && f.backend()->same_grid(backend) && f.dim() == backend.truncation(),
                        ErrorKind::shape, "forcing does not live on the backend grid");
                fnodes.push_back(std::move(f));
            }
        }
    }

    SolutionTrace tr;
    tr.invariant = true;
    tr.times = times;
    tr.problem = pb;
    tr.fields.assign(steps + 1, FourierField(pb.backend));
    tr.fields[0] = pb.u0;
    const std::size_t dim = backend.truncation();

    parallel_for(backend.num_points(), [&](std::size_t p) {
        const auto spec = backend.spectrum(p);
        for (std::size_t i = 0; i < dim; ++i) {
            const double ev = spec[i];
            for (std::size_t j = 0; j < dim; ++j) {
                cplx y = pb.u0.at(p, i, j);
                for (int n = 0; n < steps; ++n) {
                    const double t = times[n];
                    const double h = times[n + 1] - t;
                    cplx next;
                    if (mult.time_constant) {
                        const cplx mu = mult.m(0.0, ev);
                        next = std::exp(mu * h) * y;
                        if (forced)
                            for (std::size_t k = 0; k < q; ++k) {
                                const double tau = 0.5 * h * (1.0 + rule.nodes[k]);
                                next += 0.5 * h * rule.weights[k] * std::exp(mu * (h - tau)) *
                                        fnodes[n * q + k].at(p, i, j);
                            }
                    } else {
                        // fourth-order Magnus step; scalar modes commute, so only
                        // the two-point Gauss integral of mu survives
                        auto integral = [&](double a, double b) {
                            const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
                            const double r = 1.0 / std::sqrt(3.0);
                            return half * (mult.m(t + mid - half * r, ev) + mult.m(t + mid + half * r, ev));
                        };
                        next = std::exp(integral(0.0, h)) * y;
                        if (forced)
                            for (std::size_t k = 0; k < q; ++k) {
                                const double tau = 0.5 * h * (1.0 + rule.nodes[k]);
                                next += 0.5 * h * rule.weights[k] * std::exp(integral(tau, h)) *
                                        fnodes[n * q + k].at(p, i, j);
                            }
                    }
                    if (!(std::abs(next) < overflow_threshold)) {
                        std::ostringstream os;
                        os << "mode (point " << p << ", eigen index " << i << ", column " << j
                           << ") exceeded " << overflow_threshold << " at t = " << times[n + 1];
                        fail(ErrorKind::instability, os.str());
                    }
                    y = next;
                    tr.fields[n + 1].at(p, i, j) = y;
                }
            }
        }
    });
    tr.accepted_steps = steps;
    record_norms(tr, pb.order);
    for (double t : times)
        tr.forcing_norms.push_back(forced ? sobolev_norm(backend, pb.forcing(t), 0.0) : 0.0);
    return tr;
}

// ---- periodic method of lines -----------------------------------------

namespace {

// Three-stage Radau IIA (order 5, stiffly accurate, L-stable).
struct RadauTableau {
    double c[3];
    double a[3][3];
};

RadauTableau radau_iia() {
    const double s6 = std::sqrt(6.0);
    return {{(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0},
            {{(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0},
             {(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0},
             {(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0}}};
}

class PeriodicSystem {
public:
    explicit PeriodicSystem(const EvolutionProblem& pb) : pb_(pb), n_(pb.nx) {}

    const CMatrix& matrix(double t) {
        if (pb_.symbol_time_constant && have_constant_) return constant_;
        CMatrix L = assemble(t);
        if (pb_.symbol_time_constant) {
            constant_ = std::move(L);
            have_constant_ = true;
            return constant_;
        }
        scratch_ = std::move(L);
        return scratch_;
    }

    CVector forcing(double t) const {
        CVector f = CVector::Zero(static_cast<long>(n_));
        if (!pb_.forcing_samples) return f;
        const auto v = pb_.forcing_samples(t);
        require(v.size() == n_, ErrorKind::shape, "forcing returned the wrong number of samples");
        for (std::size_t j = 0; j < n_; ++j) f[j] = v[j];
        return f;
    }

    std::size_t size() const { return n_; }

private:
    CMatrix assemble(double t) const {
        const Symbol sigma = pb_.symbol_family(t);
        CMatrix L(n_, n_);
        std::vector<cplx> e(n_, cplx{});
        for (std::size_t k = 0; k < n_; ++k) {
            e.assign(n_, cplx{});
            e[k] = 1.0;
            const auto col = apply_op(sigma, std::span<const cplx>(e));
            for (std::size_t j = 0; j < n_; ++j) L(j, k) = col[j];
        }
        return L;
    }

    const EvolutionProblem& pb_;
    std::size_t n_;
    CMatrix constant_;
    CMatrix scratch_;
    bool have_constant_ = false;
};

CVector radau_step(PeriodicSystem& sys, const RadauTableau& tab, const CVector& y, double t, double h) {
    const long n = static_cast<long>(sys.size());
    CMatrix big = CMatrix::Identity(3 * n, 3 * n);
    CVector rhs(3 * n);
    std::array<CVector, 3> f;
    for (int j = 0; j < 3; ++j) {
        const CMatrix& L = sys.matrix(t + tab.c[j] * h);
        for (int i = 0; i < 3; ++i) big.block(i * n, j * n, n, n) -= (h * tab.a[i][j]) * L;
        f[j] = sys.forcing(t + tab.c[j] * h);
    }
    for (int i = 0; i < 3; ++i) {
        CVector r = y;
        for (int j = 0; j < 3; ++j) r += (h * tab.a[i][j]) * f[j];
        rhs.segment(i * n, n) = r;
    }
    const CVector stages = big.partialPivLu().solve(rhs);
    return stages.segment(2 * n, n);
}

void validate_symbol(const EvolutionProblem& pb, const Symbol& sigma, double t) {
    require(sigma.dim() == 1 && sigma.backend()->same_grid(*pb.backend), ErrorKind::shape,
            "generator symbol does not live on the backend grid");
    require(sigma.is_invariant() || sigma.nx() == pb.nx, ErrorKind::shape,
            "generator symbol x-grid does not match nx");
    const auto& backend = *pb.backend;
    const double nu = backend.rockland_degree();
    for (std::size_t p = 0; p < sigma.num_points(); ++p) {
        const double bound = pb.c0 * std::pow(1.0 + backend.spectrum(p)[0], pb.order / nu) - pb.c2;
        for (std::size_t ix = 0; ix < sigma.x_slices(); ++ix) {
            const cplx v = sigma.at(ix, p);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(ErrorKind::domain, "generator symbol is not finite at t = " + std::to_string(t));
            if (-v.real() < bound - 1e-12 * std::max(1.0, std::abs(v))) {
                std::ostringstream os;
                os << "generator violates the dissipativity convention -Re K >= c0 pi(M)^m - c2 at xi = "
                   << backend.xi(p) << ", x-index " << ix << ", t = " << t << " (Re K = " << v.real() << ")";
                fail(ErrorKind::contract, os.str());
            }
        }
    }
}

} // namespace

SolutionTrace solve_abelian(const EvolutionProblem& pb) {
    require(pb.backend != nullptr, ErrorKind::config, "evolution problem needs a backend");
    require(pb.backend->kind() == GroupKind::abelian && pb.backend->params().n == 1, ErrorKind::unsupported,
            "solve_abelian needs the one-dimensional abelian backend");
    require(static_cast<bool>(pb.symbol_family), ErrorKind::contract, "solve_abelian needs a generator symbol");
    require(pb.nx >= 2 && pb.u0_samples.size() == pb.nx, ErrorKind::shape,
            "initial samples must have nx entries");
    require(pb.rtol > 0 && pb.atol > 0, ErrorKind::config, "tolerances must be > 0");
    const auto times = output_times(pb);
    for (double t : times) {
        validate_symbol(pb, pb.symbol_family(t), t);
        if (pb.symbol_time_constant) break;
    }

    SolutionTrace tr;
    tr.invariant = false;
    tr.times = times;
    tr.problem = pb;

    PeriodicSystem sys(pb);
    const RadauTableau tab = radau_iia();
    const long n = static_cast<long>(pb.nx);
    CVector y(n);
    for (long j = 0; j < n; ++j) y[j] = pb.u0_samples[j];
    auto store = [&](const CVector& v) { tr.samples.emplace_back(v.data(), v.data() + n); };
    store(y);

    double t = 0.0;
    double h = pb.T / pb.n_steps;
    const double h_floor = 1e-14 * pb.T;
    for (int out = 1; out <= pb.n_steps; ++out) {
        const double target = times[out];
        int consecutive_rejects = 0;
        while (t < target - 1e-14 * pb.T) {
            const bool last = h >= target - t;
            const double ht = last ? target - t : h;
            const CVector full = radau_step(sys, tab, y, t, ht);
            const CVector mid = radau_step(sys, tab, y, t, 0.5 * ht);
            const CVector twice = radau_step(sys, tab, mid, t + 0.5 * ht, 0.5 * ht);
            const double err = (twice - full).cwiseAbs().maxCoeff() / 31.0;
            const double scale = pb.atol + pb.rtol * std::max(y.cwiseAbs().maxCoeff(), twice.cwiseAbs().maxCoeff());
            const double factor = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(scale / err, 1.0 / 6.0), 0.2, 4.0);
            if (err <= scale && twice.allFinite()) {
                y = twice;
                t = last ? target : t + ht;
                ++tr.accepted_steps;
                consecutive_rejects = 0;
                if (!(y.cwiseAbs().maxCoeff() < overflow_threshold)) {
                    std::ostringstream os;
                    os << "solution exceeded " << overflow_threshold << " at t = " << t;
                    fail(ErrorKind::instability, os.str());
                }
                if (!last) h = ht * factor;
            } else {
                ++tr.rejected_steps;
                ++consecutive_rejects;
                h = ht * (twice.allFinite() ? factor : 0.2);
                if (consecutive_rejects > 40 || h < h_floor) {
                    std::ostringstream os;
                    os << "step-size control gave up at t = " << t << ": " << consecutive_rejects
                       << " consecutive rejections, last step " << ht << ", error estimate " << err
                       << " vs tolerance " << scale;
                    fail(ErrorKind::stiffness, os.str());
                }
            }
        }
        t = target;
        store(y);
    }

    for (const auto& v : tr.samples) {
        tr.l2_norms.push_back(periodic_sobolev_norm(v, 0.0));
        tr.hs_norms.push_back(periodic_sobolev_norm(v, pb.order / 2.0));
    }
    for (double tt : times) {
        if (!pb.forcing_samples) {
            tr.forcing_norms.push_back(0.0);
            continue;
        }
        const auto f = pb.forcing_samples(tt);
        double acc = 0.0;
        for (const auto& v : f) acc += std::norm(v);
        tr.forcing_norms.push_back(std::sqrt(2.0 * std::numbers::pi * acc / static_cast<double>(f.size())));
    }
    return tr;
}

// ---- energy estimates --------------------------------------------------

namespace {

struct PairFit {
    double x = 0.0, y = 0.0;
    bool feasible = false;
};

// min x + y subject to A_j x + B_j y >= R_j, x, y >= 0 (vertex enumeration).
PairFit fit_pair(const std::vector<double>& A, const std::vector<double>& B, const std::vector<double>& R) {
    const std::size_t n = A.size();
    auto feasible = [&](double x, double y) {
        if (x < 0 || y < 0 || !std::isfinite(x) || !std::isfinite(y)) return false;
        for (std::size_t j = 0; j < n; ++j) {
            const double lhs = A[j] * x + B[j] * y;
            const double tol = 1e-12 * (std::abs(R[j]) + std::abs(A[j] * x) + std::abs(B[j] * y));
            if (lhs < R[j] - tol) return false;
        }
        return true;
    };
    PairFit best;
    double best_obj = std::numeric_limits<double>::infinity();
    auto consider = [&](double x, double y) {
        x = std::max(x, 0.0);
        y = std::max(y, 0.0);
        const double obj = x + y;
        if (obj > best_obj || (obj == best_obj && y >= best.y)) return;
        if (!feasible(x, y)) return;
        best = {x, y, true};
        best_obj = obj;
    };
    consider(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (A[j] > 0) consider(R[j] / A[j], 0.0);  // on the axis y = 0
        if (B[j] > 0) consider(0.0, R[j] / B[j]);  // on the axis x = 0
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double det = A[i] * B[j] - A[j] * B[i];
            if (std::abs(det) <= 1e-300) continue;
            consider((R[i] * B[j] - R[j] * B[i]) / det, (A[i] * R[j] - A[j] * R[i]) / det);
        }
    return best;
}

EnergyReport fit_energy(const std::vector<double>& times, const std::vector<double>& norms,
                        const std::vector<double>& forcing, double c2_problem) {
    EnergyReport rep;
    rep.times = times;
    const std::size_t n = times.size();
    rep.forcing_integral.assign(n, 0.0);
    std::vector<double> forcing_abs_integral(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) rep.lhs.push_back(norms[j] * norms[j]);
    for (std::size_t j = 1; j < n; ++j) {
        const double dt = times[j] - times[j - 1];
        rep.forcing_integral[j] = rep.forcing_integral[j - 1] +
                                  0.5 * dt * (forcing[j] * forcing[j] + forcing[j - 1] * forcing[j - 1]);
        forcing_abs_integral[j] = forcing_abs_integral[j - 1] + 0.5 * dt * (forcing[j] + forcing[j - 1]);
    }
    const double a = rep.lhs.front();

    const auto fit = fit_pair(std::vector<double>(n, a), rep.forcing_integral, rep.lhs);
    rep.fit_feasible = fit.feasible;
    rep.C = fit.x;
    rep.C_prime = fit.y;

    rep.unit_constants_hold = true;
    for (std::size_t j = 0; j < n; ++j)
        if (rep.lhs[j] > a * (1.0 + 1e-12)) rep.unit_constants_hold = false;

    std::vector<double> Av, Bv, Rv;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double dt = times[j + 1] - times[j];
        Rv.push_back((rep.lhs[j + 1] - rep.lhs[j]) / dt);
        Av.push_back(0.5 * (rep.lhs[j] + rep.lhs[j + 1]));
        Bv.push_back(0.5 * (forcing[j] * forcing[j] + forcing[j + 1] * forcing[j + 1]));
    }
    const auto diff = fit_pair(Av, Bv, Rv);
    rep.differential_form_holds = diff.feasible;
    rep.c1 = diff.x;
    rep.c2 = diff.y;
    rep.gronwall_holds = diff.feasible;
    if (diff.feasible)
        for (std::size_t j = 0; j < n; ++j) {
            const double bound = std::exp(rep.c1 * times[j]) * (a + rep.c2 * rep.forcing_integral[j]);
            if (rep.lhs[j] > bound * (1.0 + 1e-9)) rep.gronwall_holds = false;
        }

    rep.forward_bound_holds = true;
    for (std::size_t j = 0; j < n; ++j) {
        const double bound = std::exp(c2_problem * times[j]) * (norms.front() + forcing_abs_integral[j]);
        if (norms[j] > bound * (1.0 + 1e-12)) rep.forward_bound_holds = false;
    }
    return rep;
}

} // namespace

EnergyReport energy_check(const SolutionTrace& trace) {
    require(trace.times.size() == trace.l2_norms.size() && trace.times.size() == trace.forcing_norms.size(),
            ErrorKind::shape, "trace is incomplete");
    return fit_energy(trace.times, trace.l2_norms, trace.forcing_norms, trace.problem.c2);
}

EnergyReport sobolev_energy_check(const SolutionTrace& trace, double s) {
    require(trace.invariant, ErrorKind::contract,
            "sobolev_energy_check needs a trace from solve_invariant (commuting generator)");
    const auto& pb = trace.problem;
    const auto& backend = *pb.backend;
    std::vector<double> norms, fnorms;
    for (const auto& f : trace.fields) norms.push_back(sobolev_norm(backend, f, s));
    for (double t : trace.times) fnorms.push_back(pb.forcing ? sobolev_norm(backend, pb.forcing(t), s) : 0.0);
    EnergyReport rep = fit_energy(trace.times, norms, fnorms, pb.c2);

    EvolutionProblem weighted = pb;
    weighted.u0 = apply_sobolev_weight(pb.u0, s);
    if (pb.forcing) {
        auto f = pb.forcing;
        weighted.forcing = [f, s](double t) { return apply_sobolev_weight(f(t), s); };
    }
    const SolutionTrace wt = solve_invariant(weighted);
    double diff = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < trace.fields.size(); ++j) {
        const FourierField back = apply_sobolev_weight(wt.fields[j], -s);
        diff = std::max(diff, sobolev_norm(backend, back - trace.fields[j], 0.0));
        scale = std::max(scale, trace.l2_norms[j]);
    }
    rep.conjugation_residual = scale > 0 ? diff / scale : diff;
    rep.conjugation_holds = rep.conjugation_residual < 1e-10;
    return rep;
}

} // namespace pdo
