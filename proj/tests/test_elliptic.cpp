#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pdo/elliptic.hpp"
#include "pdo/error.hpp"

using namespace pdo;

namespace {

Symbol random_positive(const BackendPtr& h, std::mt19937_64& rng, double c) {
    std::normal_distribution<double> g;
    const auto w2 = sobolev_weight(h, 2.0);
    return Symbol::invariant(h, [&](std::size_t p) {
        const long n = long(h->truncation());
        CMatrix m = CMatrix::NullaryExpr(n, n, [&]() { return cplx(g(rng), g(rng)); });
        CMatrix herm = (m + m.adjoint()) / 2;
        herm /= herm.operatorNorm();
        return CMatrix(CMatrix(w2.block(0, p)) + c * herm);
    }, 2.0);
}

double min_eig(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    return es.eigenvalues()(0);
}

} // namespace

TEST_CASE("ellipticity of model symbols") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    for (double m : {1.0, 2.0}) {
        const auto rep = is_elliptic(sobolev_weight(h, m), m, 0.0, {-1.0, 0.0, 2.0});
        CHECK(rep.is_elliptic);
        for (double lb : rep.lower_bounds) CHECK(lb == doctest::Approx(1.0));
        for (double sv : rep.sup_values) CHECK(sv == doctest::Approx(1.0));
    }
    const auto zero = is_elliptic(Symbol(h, 0, 0.0), 2.0, 0.0, {0.0});
    CHECK_FALSE(zero.is_elliptic);
    CHECK(std::isinf(zero.sup_values[0]));

    const auto b = make_abelian_backend(1, 10.0, 41);
    const auto a = Symbol::invariant(b, [&](std::size_t p) { return CMatrix::Constant(1, 1, 1.0 + b->xi(p) * b->xi(p)); }, 2.0);
    const auto rep = is_elliptic(a, 2.0, 0.0, {0.0, 1.0});
    CHECK(rep.is_elliptic);
    CHECK(rep.lower_bounds[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.lower_bounds[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ellipticity above a spectral cutoff") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    // vanishes on nu <= 2, elliptic of order 2 above
    const auto a = multiplier_symbol(h, [](double t) { return cplx(t <= 2.0 ? 0.0 : 1.0 + t); }, 2.0);
    CHECK_FALSE(is_elliptic(a, 2.0, 0.0, {0.0}).is_elliptic);
    CHECK(is_elliptic(a, 2.0, 2.0, {0.0}).is_elliptic);
}

TEST_CASE("resolvent examples") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto a = multiplier_symbol(h, [](double t) { return cplx(1.0 + t); }, 2.0);
    const auto r = resolvent(a, -1.0);
    for (std::size_t p = 0; p < h->num_points(); ++p)
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(std::abs(r.at(0, p, k, k) - 1.0 / (2.0 + h->spectrum(p)[k])) < 1e-15);
    CHECK(r.order() == doctest::Approx(-2.0));

    const auto h2 = make_heisenberg_backend(1.0, 2.0, 2, 2);
    CMatrix m(2, 2);
    m << 2, 1, 1, 2;
    const auto blk = Symbol::invariant(h2, [&](std::size_t) { return m; }, 0.0);
    CMatrix expected(2, 2);
    expected << 3, -1, -1, 3;
    expected /= 8.0;
    CHECK((CMatrix(resolvent(blk, -1.0).block(0, 0)) - expected).norm() < 1e-14);

    try {
        resolvent(blk, 3.0);
        FAIL("expected singular");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular);
        CHECK(std::string(e.what()).find("point") != std::string::npos);
    }
}

TEST_CASE("resolvent identity and derivative law") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    std::mt19937_64 rng(1);
    const auto a = random_positive(h, rng, 0.4);
    for (cplx lam : {cplx(-1.0, 0.0), cplx(-5.0, 2.0), cplx(0.1, 3.0)}) {
        const auto r = resolvent(a, lam);
        for (std::size_t p = 0; p < h->num_points(); ++p) {
            const CMatrix shifted = CMatrix(a.block(0, p)) - lam * CMatrix::Identity(4, 4);
            CHECK((shifted * CMatrix(r.block(0, p)) - CMatrix::Identity(4, 4)).norm() < 1e-10);
        }
    }
    const auto diag = multiplier_symbol(h, [](double t) { return cplx(1.0 + t); }, 2.0);
    const cplx lam(-2.0, 0.5);
    const double dl = 1e-4;
    const auto d1 = resolvent_derivative(diag, lam, 1);
    const auto fd = cplx(1.0 / (2 * dl)) * (resolvent(diag, lam + dl) - resolvent(diag, lam - dl));
    CHECK(max_abs_difference(d1, fd) < 1e-6);
    const auto d0 = resolvent_derivative(diag, lam, 0);
    CHECK(max_abs_difference(d0, resolvent(diag, lam)) == 0.0);
}

TEST_CASE("parameter ellipticity on the negative axis") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto a = multiplier_symbol(h, [](double t) { return cplx(1.0 + t); }, 2.0);
    const auto rep = parameter_ellipticity_report(a, CurveSpec::negative_real_axis(), 2.0);
    CHECK(rep.value <= 2.0 + 1e-12);  // equality where |lambda| = 1 + nu
    CHECK(rep.value > 1.0);
    CHECK(rep.stable);

    const auto w2 = sobolev_weight(h, 2.0);
    const auto at0 = parameter_ellipticity_report(w2, CurveSpec::custom({cplx(0.0)}), 2.0);
    CHECK(at0.value == doctest::Approx(1.0));

    const auto k0 = resolvent_estimate_check(a, CurveSpec::negative_real_axis(), 2.0, 0);
    CHECK(k0.value == doctest::Approx(rep.value).epsilon(1e-14));

    // an eigenvalue sitting on the curve
    const auto crossing = multiplier_symbol(h, [](double t) { return cplx(1.0 - t); }, 2.0);
    CHECK_THROWS_AS(parameter_ellipticity_report(crossing, CurveSpec::custom({cplx(1.0 - 3.0 * 2.0)}), 2.0), Error);
}

TEST_CASE("curve at zero agrees with the ellipticity report") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    std::mt19937_64 rng(2);
    const auto a = random_positive(h, rng, 0.5);
    const auto e = is_elliptic(a, 2.0, 0.0, {0.0});
    const auto pe = parameter_ellipticity_report(a, CurveSpec::custom({cplx(0.0)}), 2.0);
    CHECK(pe.value == doctest::Approx(e.sup_values[0]).epsilon(1e-10));
}

TEST_CASE("first-order resolvent estimate spot value") {
    // xi = +-1 only: 1 + nu = 2 at every point
    const auto b = make_abelian_backend(1, 1.0, 2);
    const auto a = multiplier_symbol(b, [](double t) { return cplx(1.0 + t); }, 2.0);
    const auto rep = resolvent_estimate_check(a, CurveSpec::custom({cplx(-2.0)}), 2.0, 1);
    CHECK(std::abs(rep.value - 4.0) < 1e-10);

    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto ah = multiplier_symbol(h, [](double t) { return cplx(1.0 + t); }, 2.0);
    const auto k2 = resolvent_estimate_check(ah, CurveSpec::negative_real_axis(), 2.0, 2);
    CHECK(std::isfinite(k2.value));
    CHECK(k2.stable);
}

TEST_CASE("resolvent estimate with differences on the abelian group") {
    const auto b = make_abelian_backend(1, 20.0, 201);
    const auto a = multiplier_symbol(b, [](double t) { return cplx(1.0 + t); }, 2.0);
    const auto rep = resolvent_estimate_check(a, CurveSpec::negative_real_axis(30), 2.0, 0, {1}, {});
    CHECK(std::isfinite(rep.value));
    CHECK(rep.stable);
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    try {
        resolvent_estimate_check(sobolev_weight(h, 2.0), CurveSpec::negative_real_axis(), 2.0, 0, {1}, {});
        FAIL("expected unsupported");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsupported);
    }
}

TEST_CASE("positive symbols are parameter elliptic on the negative axis") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    std::mt19937_64 rng(99);
    const auto w2 = sobolev_weight(h, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_positive(h, rng, 0.8);
        const double c = 0.1;
        for (std::size_t p = 0; p < h->num_points(); ++p)
            REQUIRE(min_eig(CMatrix(a.block(0, p)) - c * CMatrix(w2.block(0, p))) > 0.0);
        const auto rep = parameter_ellipticity_report(a, CurveSpec::negative_real_axis(20), 2.0);
        CHECK(std::isfinite(rep.value));
        CHECK(rep.stable);
    }
}

TEST_CASE("parametrix of an invariant symbol") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto a = multiplier_symbol(h, [](double t) { return cplx(1.0 + t); }, 2.0);
    const double cutoff = 3.0;
    const auto tau = parametrix(a, 0, cutoff);
    CHECK(tau.order() == doctest::Approx(-2.0));
    const auto prod = pointwise_product(a, tau);
    for (std::size_t p = 0; p < h->num_points(); ++p)
        for (std::size_t k = 0; k < 4; ++k) {
            const double expect = h->spectrum(p)[k] > cutoff ? 1.0 : 0.0;
            CHECK(std::abs(prod.at(0, p, k, k) - expect) < 1e-14);
        }
    CHECK_THROWS_AS(parametrix(a, 1, cutoff), Error);
    try {
        parametrix(Symbol(h, 0, 2.0), 0, 0.0);
        FAIL("expected not_elliptic");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_elliptic);
    }
}

TEST_CASE("parametrix residual order") {
    const auto b = make_abelian_backend(1, 128.0, 257);
    const auto sigma = Symbol::x_dependent(b, 256, [](double x, double xi) { return cplx((2.0 + std::sin(x)) * (1.0 + xi * xi)); }, 2.0);
    for (int N = 0; N <= 2; ++N) {
        const auto study = parametrix_residual_study(sigma, N, 0.0, {8, 16, 32, 64});
        REQUIRE(study.residuals.size() == 4);
        const double expected = -(N + 1.0);
        CHECK(std::abs(study.slope - expected) <= 0.2 * std::abs(expected));
        for (std::size_t j = 1; j < 4; ++j) CHECK(study.residuals[j] < study.residuals[j - 1]);
    }
}

TEST_CASE("loglog slope of a power law") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -2.5));
    CHECK(loglog_slope(x, y) == doctest::Approx(-2.5));
}
