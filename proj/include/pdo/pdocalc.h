/* C interface to the pseudo-differential calculus library.
 *
 * Every handle is opaque and owned by the caller, who releases it with the
 * matching *_destroy function. Functions return a pdo_status; on failure
 * pdo_last_error_message() describes the problem (per thread). */
#ifndef PDO_PDOCALC_H
#define PDO_PDOCALC_H

#include <stddef.h>
#include <stdint.h>

#if defined(PDO_BUILDING_LIBRARY)
#define PDO_API __attribute__((visibility("default")))
#else
#define PDO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdo_status {
    PDO_OK = 0,
    PDO_ERR_CONFIG = 1,
    PDO_ERR_SHAPE = 2,
    PDO_ERR_BOUNDARY = 3,
    PDO_ERR_CONTRACT = 4,
    PDO_ERR_DOMAIN = 5,
    PDO_ERR_UNSUPPORTED = 6,
    PDO_ERR_SINGULAR = 7,
    PDO_ERR_CONTOUR = 8,
    PDO_ERR_DECAY = 9,
    PDO_ERR_POSITIVITY = 10,
    PDO_ERR_ACCURACY = 11,
    PDO_ERR_NOT_ELLIPTIC = 12,
    PDO_ERR_INSTABILITY = 13,
    PDO_ERR_STIFFNESS = 14,
    PDO_ERR_IO = 15,
    PDO_ERR_NULL_ARGUMENT = 16,
    PDO_ERR_INTERNAL = 17
} pdo_status;

typedef enum pdo_multiplier_kind {
    PDO_MULTIPLIER_POLY = 0,          /* params: coefficients c0, c1, ... of sum c_k t^k */
    PDO_MULTIPLIER_POWER = 1,         /* params: s, for t^s */
    PDO_MULTIPLIER_SHIFTED_POWER = 2, /* params: s, for (1 + t)^s */
    PDO_MULTIPLIER_EXP_NEG = 3        /* no params, e^-t */
} pdo_multiplier_kind;

typedef struct pdo_backend pdo_backend;
typedef struct pdo_symbol pdo_symbol;

PDO_API const char* pdo_version(void);
PDO_API const char* pdo_last_error_message(void);
PDO_API const char* pdo_status_name(pdo_status status);
/* Process exit code for a status: 0 ok, 2 configuration/shape/contract,
 * 3 numerical failure, 4 unsupported operation, 1 I/O or internal. */
PDO_API int pdo_status_exit_code(pdo_status status);

PDO_API pdo_status pdo_backend_create_abelian(int n, double xi_max, int n_xi, pdo_backend** out);
PDO_API pdo_status pdo_backend_create_heisenberg(double lambda_min, double lambda_max, int n_lambda,
                                                 int hermite_dim, pdo_backend** out);
PDO_API void pdo_backend_destroy(pdo_backend* backend);
PDO_API pdo_status pdo_backend_points(const pdo_backend* backend, size_t* out);
PDO_API pdo_status pdo_backend_truncation(const pdo_backend* backend, size_t* out);
PDO_API pdo_status pdo_backend_eigenvalue(const pdo_backend* backend, size_t point, size_t k, double* out);
PDO_API pdo_status pdo_backend_weight(const pdo_backend* backend, size_t point, double* out);

PDO_API pdo_status pdo_symbol_sobolev_weight(const pdo_backend* backend, double s, pdo_symbol** out);
PDO_API pdo_status pdo_symbol_multiplier(const pdo_backend* backend, pdo_multiplier_kind kind,
                                         const double* params, size_t n_params, double order, pdo_symbol** out);
PDO_API pdo_status pdo_symbol_entry(const pdo_symbol* symbol, size_t point, size_t i, size_t j, double* re,
                                    double* im);
PDO_API pdo_status pdo_symbol_order(const pdo_symbol* symbol, double* out);
PDO_API pdo_status pdo_symbol_complex_power(const pdo_symbol* symbol, double s_re, double s_im, pdo_symbol** out);
PDO_API pdo_status pdo_symbol_sqrt(const pdo_symbol* symbol, pdo_symbol** out);
PDO_API pdo_status pdo_symbol_resolvent(const pdo_symbol* symbol, double lambda_re, double lambda_im,
                                        pdo_symbol** out);
PDO_API pdo_status pdo_symbol_seminorm(const pdo_symbol* symbol, const int* alpha, size_t n_alpha,
                                       const int* beta, size_t n_beta, double gamma, double m, double* out);
PDO_API void pdo_symbol_destroy(pdo_symbol* symbol);

PDO_API pdo_status pdo_interpolation_constant(const pdo_backend* backend, double s, double t, double eps,
                                              double* out);

/* Runs one scenario from a JSON config. task and output_dir may be NULL to
 * use the config values; seed < 0 and threads < 0 also defer to the config. */
PDO_API pdo_status pdo_run_scenario(const char* task, const char* config_json, const char* output_dir,
                                    int64_t seed, int threads);

#ifdef __cplusplus
}
#endif

#endif
