#include "pdo/pdocalc.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "pdo/backend.hpp"
#include "pdo/elliptic.hpp"
#include "pdo/error.hpp"
#include "pdo/funcalc.hpp"
#include "pdo/garding.hpp"
#include "pdo/scenario.hpp"
#include "pdo/symbol.hpp"

struct pdo_backend {
    pdo::BackendPtr ptr;
};

struct pdo_symbol {
    pdo::Symbol value;
};

namespace {

thread_local std::string last_error;

pdo_status status_of(pdo::ErrorKind kind) {
    using pdo::ErrorKind;
    switch (kind) {
    case ErrorKind::config: return PDO_ERR_CONFIG;
    case ErrorKind::shape: return PDO_ERR_SHAPE;
    case ErrorKind::boundary: return PDO_ERR_BOUNDARY;
    case ErrorKind::contract: return PDO_ERR_CONTRACT;
    case ErrorKind::domain: return PDO_ERR_DOMAIN;
    case ErrorKind::unsupported: return PDO_ERR_UNSUPPORTED;
    case ErrorKind::singular: return PDO_ERR_SINGULAR;
    case ErrorKind::contour: return PDO_ERR_CONTOUR;
    case ErrorKind::decay: return PDO_ERR_DECAY;
    case ErrorKind::positivity: return PDO_ERR_POSITIVITY;
    case ErrorKind::accuracy: return PDO_ERR_ACCURACY;
    case ErrorKind::not_elliptic: return PDO_ERR_NOT_ELLIPTIC;
    case ErrorKind::instability: return PDO_ERR_INSTABILITY;
    case ErrorKind::stiffness: return PDO_ERR_STIFFNESS;
    case ErrorKind::io: return PDO_ERR_IO;
    }
    return PDO_ERR_INTERNAL;
}

template <class F>
pdo_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return PDO_OK;
    } catch (const pdo::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return PDO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return PDO_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return PDO_ERR_INTERNAL;
    }
}

#define PDO_REQUIRE_ARG(p)                                           \
    do {                                                             \
        if (!(p)) {                                                  \
            last_error = "argument '" #p "' must not be NULL";       \
            return PDO_ERR_NULL_ARGUMENT;                            \
        }                                                            \
    } while (0)

pdo_status wrap_symbol(pdo::Symbol s, pdo_symbol** out) {
    *out = new pdo_symbol{std::move(s)};
    return PDO_OK;
}

} // namespace

extern "C" {

const char* pdo_version(void) { return pdo::version_string; }

const char* pdo_last_error_message(void) { return last_error.c_str(); }

const char* pdo_status_name(pdo_status status) {
    switch (status) {
    case PDO_OK: return "ok";
    case PDO_ERR_CONFIG: return "config";
    case PDO_ERR_SHAPE: return "shape";
    case PDO_ERR_BOUNDARY: return "boundary";
    case PDO_ERR_CONTRACT: return "contract";
    case PDO_ERR_DOMAIN: return "domain";
    case PDO_ERR_UNSUPPORTED: return "unsupported";
    case PDO_ERR_SINGULAR: return "singular";
    case PDO_ERR_CONTOUR: return "contour";
    case PDO_ERR_DECAY: return "decay";
    case PDO_ERR_POSITIVITY: return "positivity";
    case PDO_ERR_ACCURACY: return "accuracy";
    case PDO_ERR_NOT_ELLIPTIC: return "not_elliptic";
    case PDO_ERR_INSTABILITY: return "instability";
    case PDO_ERR_STIFFNESS: return "stiffness";
    case PDO_ERR_IO: return "io";
    case PDO_ERR_NULL_ARGUMENT: return "null_argument";
    case PDO_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

int pdo_status_exit_code(pdo_status status) {
    switch (status) {
    case PDO_OK: return 0;
    case PDO_ERR_CONFIG:
    case PDO_ERR_SHAPE:
    case PDO_ERR_BOUNDARY:
    case PDO_ERR_CONTRACT:
    case PDO_ERR_NULL_ARGUMENT: return 2;
    case PDO_ERR_UNSUPPORTED: return 4;
    case PDO_ERR_IO:
    case PDO_ERR_INTERNAL: return 1;
    default: return 3;
    }
}

pdo_status pdo_backend_create_abelian(int n, double xi_max, int n_xi, pdo_backend** out) {
    PDO_REQUIRE_ARG(out);
    return guarded([&] { *out = new pdo_backend{pdo::make_abelian_backend(n, xi_max, n_xi)}; });
}

pdo_status pdo_backend_create_heisenberg(double lambda_min, double lambda_max, int n_lambda, int hermite_dim,
                                         pdo_backend** out) {
    PDO_REQUIRE_ARG(out);
    return guarded(
        [&] { *out = new pdo_backend{pdo::make_heisenberg_backend(lambda_min, lambda_max, n_lambda, hermite_dim)}; });
}

void pdo_backend_destroy(pdo_backend* backend) { delete backend; }

pdo_status pdo_backend_points(const pdo_backend* backend, size_t* out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    *out = backend->ptr->num_points();
    return PDO_OK;
}

pdo_status pdo_backend_truncation(const pdo_backend* backend, size_t* out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    *out = backend->ptr->truncation();
    return PDO_OK;
}

pdo_status pdo_backend_eigenvalue(const pdo_backend* backend, size_t point, size_t k, double* out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    return guarded([&] {
        const auto& b = *backend->ptr;
        pdo::require(point < b.num_points() && k < b.truncation(), pdo::ErrorKind::shape,
                     "eigenvalue index out of range");
        *out = b.spectrum(point)[k];
    });
}

pdo_status pdo_backend_weight(const pdo_backend* backend, size_t point, double* out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    return guarded([&] {
        pdo::require(point < backend->ptr->num_points(), pdo::ErrorKind::shape, "point index out of range");
        *out = backend->ptr->weight(point);
    });
}

pdo_status pdo_symbol_sobolev_weight(const pdo_backend* backend, double s, pdo_symbol** out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    return guarded([&] { wrap_symbol(pdo::sobolev_weight(backend->ptr, s), out); });
}

pdo_status pdo_symbol_multiplier(const pdo_backend* backend, pdo_multiplier_kind kind, const double* params,
                                 size_t n_params, double order, pdo_symbol** out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    if (n_params > 0) PDO_REQUIRE_ARG(params);
    return guarded([&] {
        std::function<pdo::cplx(double)> f;
        switch (kind) {
        case PDO_MULTIPLIER_POLY: {
            pdo::require(n_params >= 1, pdo::ErrorKind::config, "poly multiplier needs at least one coefficient");
            std::vector<double> c(params, params + n_params);
            f = [c](double t) {
                pdo::cplx acc{};
                for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
                return acc;
            };
            break;
        }
        case PDO_MULTIPLIER_POWER:
        case PDO_MULTIPLIER_SHIFTED_POWER: {
            pdo::require(n_params == 1, pdo::ErrorKind::config, "power multipliers take exactly one parameter");
            const double s = params[0];
            const double shift = kind == PDO_MULTIPLIER_SHIFTED_POWER ? 1.0 : 0.0;
            f = [s, shift](double t) { return pdo::cplx(std::pow(shift + t, s), 0.0); };
            break;
        }
        case PDO_MULTIPLIER_EXP_NEG:
            pdo::require(n_params == 0, pdo::ErrorKind::config, "exp_neg takes no parameters");
            f = [](double t) { return pdo::cplx(std::exp(-t), 0.0); };
            break;
        default: pdo::fail(pdo::ErrorKind::config, "unknown multiplier kind");
        }
        wrap_symbol(pdo::multiplier_symbol(backend->ptr, f, order), out);
    });
}

pdo_status pdo_symbol_entry(const pdo_symbol* symbol, size_t point, size_t i, size_t j, double* re, double* im) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(re);
    PDO_REQUIRE_ARG(im);
    return guarded([&] {
        const auto& s = symbol->value;
        pdo::require(point < s.num_points() && i < s.dim() && j < s.dim(), pdo::ErrorKind::shape,
                     "symbol entry index out of range");
        const pdo::cplx v = s.at(0, point, i, j);
        *re = v.real();
        *im = v.imag();
    });
}

pdo_status pdo_symbol_order(const pdo_symbol* symbol, double* out) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(out);
    *out = symbol->value.order();
    return PDO_OK;
}

pdo_status pdo_symbol_complex_power(const pdo_symbol* symbol, double s_re, double s_im, pdo_symbol** out) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(out);
    return guarded([&] { wrap_symbol(pdo::complex_power(symbol->value, {s_re, s_im}), out); });
}

pdo_status pdo_symbol_sqrt(const pdo_symbol* symbol, pdo_symbol** out) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(out);
    return guarded([&] { wrap_symbol(pdo::sqrt_symbol(symbol->value), out); });
}

pdo_status pdo_symbol_resolvent(const pdo_symbol* symbol, double lambda_re, double lambda_im, pdo_symbol** out) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(out);
    return guarded([&] { wrap_symbol(pdo::resolvent(symbol->value, {lambda_re, lambda_im}), out); });
}

pdo_status pdo_symbol_seminorm(const pdo_symbol* symbol, const int* alpha, size_t n_alpha, const int* beta,
                               size_t n_beta, double gamma, double m, double* out) {
    PDO_REQUIRE_ARG(symbol);
    PDO_REQUIRE_ARG(out);
    if (n_alpha > 0) PDO_REQUIRE_ARG(alpha);
    if (n_beta > 0) PDO_REQUIRE_ARG(beta);
    return guarded([&] {
        pdo::MultiIndex a(alpha, alpha + n_alpha), b(beta, beta + n_beta);
        *out = pdo::seminorm(symbol->value, a, b, gamma, m);
    });
}

void pdo_symbol_destroy(pdo_symbol* symbol) { delete symbol; }

pdo_status pdo_interpolation_constant(const pdo_backend* backend, double s, double t, double eps, double* out) {
    PDO_REQUIRE_ARG(backend);
    PDO_REQUIRE_ARG(out);
    return guarded([&] { *out = pdo::interpolation_constant(*backend->ptr, s, t, eps); });
}

pdo_status pdo_run_scenario(const char* task, const char* config_json, const char* output_dir, int64_t seed,
                            int threads) {
    PDO_REQUIRE_ARG(config_json);
    return guarded([&] {
        pdo::ScenarioOptions opt;
        if (task) opt.task = task;
        if (output_dir) opt.output_dir = output_dir;
        if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
        if (threads >= 0) opt.threads = static_cast<unsigned>(threads);
        pdo::run_scenario(config_json, opt);
    });
}

} // extern "C"
