/* Exercises the C interface end to end. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <unistd.h>

#include "pdo/pdocalc.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
    do {                                                                \
        if (!(cond)) {                                                  \
            fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                 \
        }                                                               \
    } while (0)

int main(void) {
    pdo_backend* h = NULL;
    pdo_backend* a = NULL;
    pdo_symbol* w = NULL;
    pdo_symbol* r = NULL;
    pdo_symbol* res = NULL;
    pdo_symbol* mult = NULL;
    size_t n = 0, dim = 0;
    double v = 0.0, re = 0.0, im = 0.0;

    EXPECT(strlen(pdo_version()) > 0);
    EXPECT(pdo_backend_create_heisenberg(0.5, 4.0, 8, 4, &h) == PDO_OK);
    EXPECT(pdo_backend_points(h, &n) == PDO_OK && n == 16);
    EXPECT(pdo_backend_truncation(h, &dim) == PDO_OK && dim == 4);
    /* point 8 is lambda = 0.5 on the positive half-line */
    EXPECT(pdo_backend_eigenvalue(h, 8, 2, &v) == PDO_OK && fabs(v - 2.5) < 1e-12);
    EXPECT(pdo_backend_weight(h, 8, &v) == PDO_OK && v > 0.0);
    EXPECT(pdo_backend_eigenvalue(h, 99, 0, &v) != PDO_OK);

    EXPECT(pdo_symbol_sobolev_weight(h, 2.0, &w) == PDO_OK);
    EXPECT(pdo_symbol_order(w, &v) == PDO_OK && fabs(v - 2.0) < 1e-15);
    EXPECT(pdo_symbol_sqrt(w, &r) == PDO_OK);
    EXPECT(pdo_symbol_entry(r, 8, 1, 1, &re, &im) == PDO_OK);
    EXPECT(fabs(re - sqrt(2.5)) < 1e-9 && fabs(im) < 1e-12);
    EXPECT(pdo_symbol_resolvent(w, -1.0, 0.0, &res) == PDO_OK);
    EXPECT(pdo_symbol_entry(res, 8, 0, 0, &re, &im) == PDO_OK && fabs(re - 1.0 / 2.5) < 1e-14);
    EXPECT(pdo_symbol_seminorm(w, NULL, 0, NULL, 0, 0.0, 2.0, &v) == PDO_OK && fabs(v - 1.0) < 1e-12);

    const double coeffs[2] = {1.0, 1.0};
    EXPECT(pdo_backend_create_abelian(1, 10.0, 101, &a) == PDO_OK);
    EXPECT(pdo_symbol_multiplier(a, PDO_MULTIPLIER_POLY, coeffs, 2, 2.0, &mult) == PDO_OK);
    EXPECT(pdo_symbol_entry(mult, 60, 0, 0, &re, &im) == PDO_OK && fabs(re - 5.0) < 1e-12);
    EXPECT(pdo_interpolation_constant(h, 1.0, 0.5, 0.25, &v) == PDO_OK && v <= 1.0);

    pdo_backend* bad = NULL;
    pdo_status st = pdo_backend_create_heisenberg(0.0, 4.0, 8, 4, &bad);
    EXPECT(st == PDO_ERR_CONFIG);
    EXPECT(bad == NULL);
    EXPECT(pdo_status_exit_code(st) == 2);
    EXPECT(strstr(pdo_last_error_message(), "lambda_min") != NULL);
    EXPECT(strcmp(pdo_status_name(st), "config") == 0);
    EXPECT(pdo_backend_points(NULL, &n) == PDO_ERR_NULL_ARGUMENT);
    EXPECT(pdo_symbol_sqrt(w, NULL) == PDO_ERR_NULL_ARGUMENT);
    EXPECT(pdo_status_exit_code(PDO_ERR_UNSUPPORTED) == 4);
    EXPECT(pdo_status_exit_code(PDO_ERR_STIFFNESS) == 3);
    EXPECT(pdo_status_exit_code(PDO_ERR_IO) == 1);

    char dir[64];
    snprintf(dir, sizeof dir, "/tmp/pdo_capi_smoke_%ld", (long)getpid());
    const char* cfg =
        "{\"task\": \"interpolate\", \"backend\": {\"group\": \"heisenberg\"},"
        " \"params\": {\"s\": 1.0, \"t\": 0.5, \"eps\": 0.25}}";
    EXPECT(pdo_run_scenario(NULL, cfg, dir, 3, 1) == PDO_OK);
    char path[128];
    snprintf(path, sizeof path, "%s/report.json", dir);
    FILE* f = fopen(path, "r");
    EXPECT(f != NULL);
    if (f) {
        fclose(f);
        remove(path);
        snprintf(path, sizeof path, "%s/manifest.json", dir);
        remove(path);
        snprintf(path, sizeof path, "%s/interpolation_modes.csv", dir);
        remove(path);
        rmdir(dir);
    }
    EXPECT(pdo_run_scenario("garding", cfg, dir, -1, -1) == PDO_ERR_CONFIG);
    EXPECT(pdo_run_scenario(NULL, NULL, dir, -1, -1) == PDO_ERR_NULL_ARGUMENT);

    pdo_symbol_destroy(mult);
    pdo_symbol_destroy(res);
    pdo_symbol_destroy(r);
    pdo_symbol_destroy(w);
    pdo_backend_destroy(a);
    pdo_backend_destroy(h);
    pdo_symbol_destroy(NULL);

    if (failures) fprintf(stderr, "%d checks failed\n", failures);
    else printf("capi smoke: all checks passed\n");
    return failures ? 1 : 0;
}
