#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pdo/error.hpp"
#include "pdo/funcalc.hpp"
#include "pdo/quadrature.hpp"

using namespace pdo;

namespace {

CMatrix random_unitary(long n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix z = CMatrix::NullaryExpr(n, n, [&]() { return cplx(g(rng), g(rng)); });
    Eigen::HouseholderQR<CMatrix> qr(z);
    return qr.householderQ() * CMatrix::Identity(n, n);
}

CMatrix random_hpd(long n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(std::log(lo), std::log(hi));
    Eigen::VectorXd d(n);
    for (long k = 0; k < n; ++k) d[k] = std::exp(U(rng));
    d[0] = lo;
    d[n - 1] = hi;
    const CMatrix q = random_unitary(n, rng);
    CMatrix m = q * d.cast<cplx>().asDiagonal() * q.adjoint();
    return (m + m.adjoint()) / 2;
}

double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / b.norm(); }

Symbol random_pd_symbol(const BackendPtr& h, std::mt19937_64& rng, double lo, double hi) {
    return Symbol::invariant(h, [&](std::size_t) { return random_hpd(long(h->truncation()), lo, hi, rng); }, 2.0);
}

CMatrix diag(std::initializer_list<double> v) {
    Eigen::VectorXcd d(long(v.size()));
    long k = 0;
    for (double x : v) d[k++] = x;
    return d.asDiagonal();
}

} // namespace

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 2, 5, 20, 200}) {
        const auto r = gauss_legendre(n);
        double sw = 0.0;
        for (double w : r.weights) sw += w;
        CHECK(sw == doctest::Approx(2.0).epsilon(1e-13));
        // exact up to degree 2n - 1
        const int deg = std::min(2 * n - 1, 40);
        double integral = 0.0;
        for (int j = 0; j < n; ++j) integral += r.weights[j] * std::pow(r.nodes[j], deg - (deg % 2));
        CHECK(integral == doctest::Approx(2.0 / (deg - (deg % 2) + 1)).epsilon(1e-12));
        for (int j = 1; j < n; ++j) CHECK(r.nodes[j] > r.nodes[j - 1]);
    }
    CHECK_THROWS_AS(gauss_legendre(0), Error);
}

TEST_CASE("keyhole contour construction") {
    const auto c = keyhole_contour();
    CHECK(c.segments.size() == 4);
    CHECK(c.size() == 800);
    CHECK(c.encloses(cplx(2.0, 0.0)));
    CHECK(c.encloses(cplx(100.0, 50.0)));
    CHECK_FALSE(c.encloses(cplx(-3.0, 0.1)));
    CHECK_FALSE(c.encloses(cplx(0.1, 0.0)));
    CHECK_FALSE(c.encloses(cplx(2e4, 0.0)));
    CHECK_THROWS_AS(keyhole_contour(0.0), Error);
    CHECK_THROWS_AS(keyhole_contour(2.0, 0.35, 1.0), Error);
    CHECK_THROWS_AS(keyhole_contour(0.5, 0.0), Error);
    CHECK_THROWS_AS(keyhole_contour(0.5, 1.6), Error);
    CHECK_THROWS_AS(keyhole_contour(0.5, 0.35, 1e4, 1), Error);
}

TEST_CASE("scalar Cauchy formula, orientation and truncation tail") {
    const CMatrix two = CMatrix::Constant(1, 1, 2.0);
    const auto F = inverse_function();
    const auto c = keyhole_contour();
    const cplx v = dunford_riesz(two, F, c)(0, 0);
    CHECK(std::abs(v - 0.5) < 1e-8);
    CHECK(std::abs(dunford_riesz(two, F, c.reversed())(0, 0) + v) < 1e-14);
    const cplx wide = dunford_riesz(two, F, keyhole_contour(0.5, 0.35, 2e4))(0, 0);
    CHECK(std::abs(wide - v) < 1e-8);
}

TEST_CASE("functional calculus on diagonal matrices") {
    CHECK(rel(dunford_riesz(diag({2.0}), inverse_function(), keyhole_contour()), diag({0.5})) < 1e-10);
    CHECK(rel(dunford_riesz(diag({4.0}), inverse_sqrt_function(), keyhole_contour()), diag({0.5})) < 1e-10);
    CHECK(rel(dunford_riesz(diag({1.0, 9.0, 400.0}), power_function(-1.5), keyhole_contour()),
              diag({1.0, 1.0 / 27.0, 1.0 / 8000.0})) < 1e-9);
}

TEST_CASE("Dunford-Riesz against the eigendecomposition oracle") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix m = random_hpd(6, 1.0, 100.0, rng);
        const CMatrix ref = matfun_oracle(m, [](double t) { return cplx(1.0 / std::sqrt(t)); });
        CHECK(rel(dunford_riesz(m, inverse_sqrt_function(), keyhole_contour()), ref) < 1e-8);
        const CMatrix ref1 = matfun_oracle(m, [](double t) { return cplx(1.0 / t); });
        CHECK(rel(dunford_riesz(m, inverse_function(), keyhole_contour()), ref1) < 1e-8);
    }
}

TEST_CASE("eigendecomposition oracle") {
    CHECK(rel(matfun_oracle(diag({1.0, 2.0, 5.0}), [](double t) { return cplx(t * t); }), diag({1.0, 4.0, 25.0})) < 1e-15);
    CMatrix m(2, 2);
    m << 2, 1, 1, 2;
    CHECK(rel(matfun_oracle(m, [](double t) { return cplx(t); }), m) < 1e-14);
    const CMatrix r = matfun_oracle(m, [](double t) { return cplx(std::sqrt(t)); });
    CHECK((r * r - m).norm() < 1e-12);
    CMatrix bad(2, 2);
    bad << 1, 2, 0, 1;
    try {
        matfun_oracle(bad, [](double t) { return cplx(t); });
        FAIL("expected contract");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::contract);
    }
}

TEST_CASE("decay contract") {
    const CMatrix m = diag({2.0, 3.0});
    try {
        dunford_riesz(m, power_function(0.5), keyhole_contour());
        FAIL("expected decay error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::decay);
    }
    // e^{-z}/z grows without bound along the rays of the keyhole
    try {
        dunford_riesz(m, exp_neg_inverse_function(), keyhole_contour());
        FAIL("expected decay error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::decay);
    }
    HolomorphicFunction liar{"liar", [](cplx z) { return std::sqrt(z); }, -1.0};
    try {
        dunford_riesz(m, liar, keyhole_contour());
        FAIL("expected decay error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::decay);
    }
    CHECK_THROWS_AS(holomorphic_from_name("cosh"), Error);
    CHECK(holomorphic_from_name("power", -0.25).decay == doctest::Approx(-0.25));
}

TEST_CASE("spectrum must stay inside the contour") {
    for (double ev : {0.4, -1.0, 0.5, 2e4}) {
        try {
            dunford_riesz(diag({2.0, ev}), inverse_function(), keyhole_contour());
            FAIL("expected contour error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::contour);
        }
    }
}

TEST_CASE("contour invariance") {
    std::mt19937_64 rng(8);
    const CMatrix m = random_hpd(5, 2.0, 200.0, rng);
    const CMatrix base = dunford_riesz(m, inverse_sqrt_function(), keyhole_contour());
    for (double theta : {0.2, 0.35, 0.6})
        for (double eps : {0.25, 0.5, 1.0}) {
            const CMatrix v = dunford_riesz(m, inverse_sqrt_function(), keyhole_contour(eps, theta));
            CHECK((v - base).norm() / base.norm() < 1e-9);
        }
}

TEST_CASE("complex powers") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    std::mt19937_64 rng(10);
    const auto a = random_pd_symbol(h, rng, 1.0, 50.0);
    CHECK(max_abs_difference(complex_power(a, 1.0), a) < 1e-10 * max_abs(a));
    const auto p = complex_power(a, -0.3);
    CHECK(p.order() == doctest::Approx(-0.6));
    for (std::size_t q = 0; q < h->num_points(); ++q) {
        const CMatrix ref = matfun_oracle(a.block(0, q), [](double t) { return cplx(std::pow(t, -0.3)); });
        CHECK(rel(p.block(0, q), ref) < 1e-8);
    }
    const auto w2 = sobolev_weight(h, 2.0);
    CHECK(max_abs_difference(complex_power(w2, 0.5), sobolev_weight(h, 1.0)) < 1e-9);

    const auto ci = complex_power(a, cplx(-0.5, 0.7));
    for (std::size_t q = 0; q < h->num_points(); ++q) {
        const CMatrix ref = matfun_oracle(a.block(0, q), [](double t) { return std::pow(cplx(t), cplx(-0.5, 0.7)); });
        CHECK(rel(ci.block(0, q), ref) < 1e-8);
    }

    const auto indefinite = multiplier_symbol(h, [](double t) { return cplx(2.0 - t); }, 2.0);
    try {
        complex_power(indefinite, -0.5);
        FAIL("expected positivity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::positivity);
        CHECK(std::string(e.what()).find("point") != std::string::npos);
    }
}

TEST_CASE("semigroup property of powers") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 6, 4);
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_pd_symbol(h, rng, 1.0, 1e3);
        for (auto [s1, s2] : {std::pair{-0.3, -0.4}, std::pair{0.5, 0.25}, std::pair{1.3, -0.8}}) {
            const auto lhs = pointwise_product(complex_power(a, s1), complex_power(a, s2));
            const auto rhs = complex_power(a, s1 + s2);
            CHECK(max_abs_difference(lhs, rhs) <= 1e-8 * max_abs(rhs));
        }
    }
}

TEST_CASE("square roots") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 2);
    CHECK(max_abs_difference(sqrt_symbol(Symbol::identity(h)), Symbol::identity(h)) < 1e-10);
    const auto d = Symbol::invariant(h, [](std::size_t) { return diag({4.0, 9.0}); }, 0.0);
    const auto r = sqrt_symbol(d);
    CHECK(std::abs(r.at(0, 3, 0, 0) - 2.0) < 1e-9);
    CHECK(std::abs(r.at(0, 3, 1, 1) - 3.0) < 1e-9);
    CHECK(std::abs(r.at(0, 3, 0, 1)) < 1e-12);

    std::mt19937_64 rng(14);
    const auto h4 = make_heisenberg_backend(0.5, 4.0, 8, 5);
    const auto a = random_pd_symbol(h4, rng, 1.0, 1e3);
    const auto s = sqrt_symbol(a);
    CHECK(s.order() == doctest::Approx(1.0));
    for (std::size_t q = 0; q < h4->num_points(); ++q) {
        const CMatrix blk = s.block(0, q);
        CHECK(rel(blk * blk, a.block(0, q)) < 1e-8);
    }
}

TEST_CASE("class order of the calculus output") {
    const auto b = make_abelian_backend(1, 20.0, 401);
    const auto F = inverse_sqrt_function();
    const auto rep = check_class_membership(
        [&](const BackendPtr& be) { return dunford_riesz(sobolev_weight(be, 2.0), F, keyhole_contour()); }, b, -1.0, 1.0, 0.0, 3);
    CHECK(rep.stable);
    CHECK(rep.entries.front().value == doctest::Approx(1.0).epsilon(1e-8));
    const auto out = dunford_riesz(sobolev_weight(b, 2.0), F, keyhole_contour());
    CHECK(out.order() == doctest::Approx(-1.0));
}
