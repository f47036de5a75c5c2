#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pdo/error.hpp"
#include "pdo/garding.hpp"

using namespace pdo;

namespace {

Symbol classical(const BackendPtr& b) {
    return Symbol::invariant(b, [&](std::size_t p) { return CMatrix::Constant(1, 1, 1.0 + b->xi(p) * b->xi(p)); }, 2.0);
}

} // namespace

TEST_CASE("real part examples") {
    const auto h = make_heisenberg_backend(1.0, 2.0, 2, 2);
    const auto herm = random_hermitian_symbol(h, 4);
    CHECK(max_abs_difference(real_part_symbol(herm), herm) < 1e-15);
    CHECK(max_abs(real_part_symbol(cplx(0.0, 1.0) * herm)) < 1e-15);
    CMatrix m(2, 2);
    m << 1, cplx(0, 2), 0, 1;
    const auto a = Symbol::invariant(h, [&](std::size_t) { return m; }, 0.0);
    CMatrix expected(2, 2);
    expected << 1, cplx(0, 1), cplx(0, -1), 1;
    CHECK((CMatrix(real_part_symbol(a).block(0, 0)) - expected).norm() < 1e-15);

    // x-dependent: result is hermitian (real for scalars) at every point
    const auto b = make_abelian_backend(1, 8.0, 17);
    const auto ax = Symbol::x_dependent(b, 16, [](double x, double xi) { return cplx((2 + std::sin(x)) * xi * xi, xi * std::cos(x)); }, 2.0);
    const auto A = real_part_symbol(ax);
    for (auto v : A.raw()) CHECK(v.imag() == 0.0);
}

TEST_CASE("lower bound check") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto two = cplx(2.0) * sobolev_weight(h, 2.0);
    const auto ok = lower_bound_check(two, 2.0, 1.0);
    CHECK(ok.holds);
    CHECK(ok.margin == doctest::Approx(1.5));  // (2 - 1)(1 + nu_min), nu_min = 0.5
    CHECK_FALSE(lower_bound_check(two, 2.0, 3.0).holds);

    const auto B = random_hermitian_symbol(h, 21);
    const auto pert = sobolev_weight(h, 2.0) + cplx(0.1) * B;
    CHECK(lower_bound_check(pert, 2.0, 0.9).holds);
    CHECK_THROWS_AS(lower_bound_check(pert, 2.0, 0.0), Error);
}

TEST_CASE("classical Garding on the abelian group") {
    const auto b = make_abelian_backend(1, 10.0, 101);
    const auto rep = garding_certify(classical(b), 2.0, 1.0, 1.0, 200);
    CHECK(rep.certified);
    CHECK(rep.C1 == 1.0);
    CHECK(rep.C2 == 0.0);
    CHECK(rep.margin >= -1e-9);
    CHECK(rep.q_is_zero);
    CHECK(rep.trials == 200);
}

TEST_CASE("Garding on the Heisenberg group") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 6);
    const auto w = garding_certify(sobolev_weight(h, 2.0), 2.0, 1.0, 1.0);
    CHECK(w.certified);
    CHECK(w.C2 == 0.0);

    const auto a = sobolev_weight(h, 2.0) + cplx(0.5) * random_hermitian_symbol(h, 5);
    // lambda_min = 0.5: A >= 1.5 - 0.5 >= (2/3) pi(M)^2, so C0 = 0.6 holds
    const auto rep = garding_certify(a, 2.0, 0.6, 0.4, 200);
    CHECK(rep.certified);
    CHECK(rep.C2 <= 0.5 + garding_tolerance);
    CHECK(rep.remainder_sup < 1e-8);
    CHECK_FALSE(rep.remainder_order.has_value());

    try {
        garding_certify(a, 2.0, 0.9, 0.4);
        FAIL("expected positivity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::positivity);
    }
    CHECK_THROWS_AS(garding_certify(a, 2.0, 0.6, 0.7), Error);
    CHECK_THROWS_AS(garding_certify(a, 2.0, 0.6, 0.0), Error);
}

TEST_CASE("quadratic form identity for invariant symbols") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    const auto a = Symbol::invariant(h, [&](std::size_t) { return CMatrix(CMatrix::NullaryExpr(4, 4, [&]() { return cplx(g(rng), g(rng)); })); }, 0.0);
    const auto A = real_part_symbol(a);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = FourierField::from_function(h, [&](std::size_t, std::size_t, std::size_t) { return cplx(g(rng), g(rng)); });
        const double lhs = plancherel_inner(*h, apply_op(a, u), u).real();
        const cplx rhs = plancherel_inner(*h, apply_op(A, u), u);
        CHECK(std::abs(lhs - rhs.real()) < 1e-10 * std::abs(lhs));
        CHECK(std::abs(rhs.imag()) < 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("scale covariance of the certified constants") {
    const auto b = make_abelian_backend(1, 32.0, 65);
    const auto a = Symbol::x_dependent(b, 64, [](double x, double xi) { return cplx((2.0 + std::sin(x)) * (1.0 + xi * xi)); }, 2.0);
    const auto base = garding_certify(a, 2.0, 0.45, 0.4, 100);
    CHECK(base.certified);
    REQUIRE(base.remainder_order.has_value());
    CHECK(*base.remainder_order <= base.expected_remainder_order + 0.25);
    for (double c : {0.5, 3.0}) {
        const auto scaled = garding_certify(cplx(c) * a, 2.0, 0.45 * c, 0.4 * c, 100);
        CHECK(scaled.certified);
        CHECK(scaled.C1 == doctest::Approx(c * base.C1));
        CHECK(std::abs(scaled.C2 - c * base.C2) <= 1e-9 * std::max(1.0, c * base.C2));
        CHECK(std::abs(scaled.margin - c * base.margin) <= 1e-9 * std::max(1.0, std::abs(c * base.margin)));
    }
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto d = cplx(2.0) * sobolev_weight(h, 2.0);
    const auto r1 = garding_certify(d, 2.0, 2.0, 1.0, 50);
    const auto r3 = garding_certify(cplx(3.0) * d, 2.0, 6.0, 3.0, 50);
    CHECK(r3.C2 == doctest::Approx(3.0 * r1.C2));
    CHECK(r3.margin == doctest::Approx(3.0 * r1.margin));
}

TEST_CASE("certification is reproducible from the seed") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto a = sobolev_weight(h, 2.0) + cplx(0.3) * random_hermitian_symbol(h, 9);
    const auto r1 = garding_certify(a, 2.0, 0.6, 0.3, 40, 77);
    const auto r2 = garding_certify(a, 2.0, 0.6, 0.3, 40, 77);
    CHECK(r1.margin == r2.margin);
    CHECK(r1.witness == r2.witness);
    CHECK(r1.seed == 77);
}

TEST_CASE("interpolation constants") {
    const auto h = make_heisenberg_backend(1.0, 4.0, 7, 4);  // lambda = 1, k = 1 gives 1 + nu = 4
    CHECK(interpolation_constant(*h, 1.0, 1.0, 1.0) == 0.0);
    CHECK(interpolation_constant(*h, 1.0, 0.5, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(interpolation_constant(*h, 1.0, 0.5, 1.0) == 0.0);
    const auto coarse = make_heisenberg_backend(1.3, 4.0, 3, 2);
    CHECK(interpolation_constant(*coarse, 1.0, 0.5, 0.25) <= 1.0);

    for (auto [s, t, eps] : {std::tuple{1.0, 0.5, 0.25}, std::tuple{2.0, 1.0, 0.01}, std::tuple{-0.5, -1.0, 3.0},
                             std::tuple{3.0, 0.0, 1e-3}}) {
        const double C = interpolation_constant(*h, s, t, eps);
        for (std::size_t p = 0; p < h->num_points(); ++p)
            for (double nu : h->spectrum(p))
                CHECK(std::pow(1.0 + nu, t) <= eps * std::pow(1.0 + nu, s) + C);
    }
    try {
        interpolation_constant(*h, 0.5, 1.0, 0.25);
        FAIL("expected contract");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::contract);
    }
    CHECK_THROWS_AS(interpolation_constant(*h, 1.0, 0.5, 0.0), Error);
    CHECK_THROWS_AS(interpolation_constant(*h, 1.0, -0.5, 1.0), Error);
}
