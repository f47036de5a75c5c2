#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles/oscillator.hpp"
#include "pdo/backend.hpp"
#include "pdo/error.hpp"
#include "pdo/field.hpp"
#include "pdo/symbol.hpp"

using namespace pdo;
using std::numbers::pi;

namespace {

std::size_t point_at(const GroupBackend& b, double coord) {
    const auto p = b.find_point(std::span<const double>(&coord, 1));
    REQUIRE(p.has_value());
    return *p;
}

} // namespace

TEST_CASE("abelian grid is uniform with cell-volume weights") {
    const auto b = make_abelian_backend(1, 10.0, 5);
    REQUIRE(b->num_points() == 5);
    const double expected[] = {-10, -5, 0, 5, 10};
    for (std::size_t p = 0; p < 5; ++p) {
        CHECK(b->xi(p) == doctest::Approx(expected[p]).epsilon(1e-15));
        CHECK(b->weight(p) == doctest::Approx(5.0 / (2 * pi)).epsilon(1e-15));
    }
    CHECK(b->truncation() == 1);
    CHECK(b->homogeneous_dimension() == 1);
    CHECK(b->rockland_degree() == 2);
}

TEST_CASE("abelian spectrum is |xi|^2") {
    const auto b = make_abelian_backend(1, 6.0, 13);
    CHECK(b->spectrum(point_at(*b, 3.0))[0] == doctest::Approx(9.0));
    const auto b2 = make_abelian_backend(2, 2.0, 5);
    CHECK(b2->num_points() == 25);
    CHECK(b2->homogeneous_dimension() == 2);
    const double xy[] = {1.0, -2.0};
    const auto p = b2->find_point(xy);
    REQUIRE(p);
    CHECK(b2->spectrum(*p)[0] == doctest::Approx(5.0));
    CHECK(b2->weight(*p) == doctest::Approx(1.0 / (4 * pi * pi)));
}

TEST_CASE("Parseval on a Gaussian") {
    // f(x) = exp(-x^2/2): f^(xi) = sqrt(2 pi) exp(-xi^2/2), ||f||^2 = sqrt(pi)
    const auto b = make_abelian_backend(1, 20.0, 2048);
    const auto u = FourierField::from_function(
        b, [&](std::size_t p, std::size_t, std::size_t) { return cplx(std::sqrt(2 * pi) * std::exp(-0.5 * b->xi(p) * b->xi(p))); });
    CHECK(std::abs(sobolev_norm(*b, u, 0.0) - std::sqrt(std::sqrt(pi))) < 1e-6);
}

TEST_CASE("Gaussian pair inner product") {
    // int exp(-x^2/2) exp(-x^2) dx = sqrt(2 pi / 3)
    const auto b = make_abelian_backend(1, 20.0, 2048);
    const auto u = FourierField::from_function(
        b, [&](std::size_t p, std::size_t, std::size_t) { return cplx(std::sqrt(2 * pi) * std::exp(-0.5 * b->xi(p) * b->xi(p))); });
    const auto w = FourierField::from_function(
        b, [&](std::size_t p, std::size_t, std::size_t) { return cplx(std::sqrt(pi) * std::exp(-0.25 * b->xi(p) * b->xi(p))); });
    const cplx ip = plancherel_inner(*b, u, w);
    CHECK(std::abs(ip - std::sqrt(2 * pi / 3)) < 1e-6);
}

TEST_CASE("heisenberg rejects lambda_min <= 0 and bad grids") {
    CHECK_THROWS_AS(make_heisenberg_backend(0.0, 4.0, 8, 4), Error);
    CHECK_THROWS_AS(make_heisenberg_backend(-1.0, 4.0, 8, 4), Error);
    CHECK_THROWS_AS(make_heisenberg_backend(2.0, 1.0, 8, 4), Error);
    CHECK_THROWS_AS(make_heisenberg_backend(0.5, 4.0, 1, 4), Error);
    CHECK_THROWS_AS(make_heisenberg_backend(0.5, 4.0, 8, 0), Error);
    CHECK_THROWS_AS(make_abelian_backend(0, 1.0, 8), Error);
    CHECK_THROWS_AS(make_abelian_backend(1, -1.0, 8), Error);
    CHECK_THROWS_AS(make_abelian_backend(1, 1.0, 1), Error);
    try {
        make_heisenberg_backend(0.0, 4.0, 8, 4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("lambda_min") != std::string::npos);
    }
}

TEST_CASE("heisenberg grid layout and weights") {
    const auto b = make_heisenberg_backend(0.5, 4.0, 8, 4);
    REQUIRE(b->num_points() == 16);
    CHECK(b->homogeneous_dimension() == 4);
    CHECK(b->truncation() == 4);
    CHECK(b->lambda(0) == doctest::Approx(-4.0));
    CHECK(b->lambda(7) == doctest::Approx(-0.5));
    CHECK(b->lambda(8) == doctest::Approx(0.5));
    CHECK(b->lambda(15) == doctest::Approx(4.0));
    for (std::size_t p = 0; p < 16; ++p) {
        CHECK(b->weight(p) > 0.0);
        CHECK(b->weight(p) == doctest::Approx(std::abs(b->lambda(p)) * 0.5 / (4 * pi * pi)));
    }
}

TEST_CASE("heisenberg spectrum matches the discretized oscillator") {
    const auto b = make_heisenberg_backend(0.5, 4.0, 8, 6);
    CHECK(b->spectrum(point_at(*b, 1.0))[0] == doctest::Approx(1.0));
    CHECK(b->spectrum(point_at(*b, 2.0))[3] == doctest::Approx(14.0));
    CHECK(b->spectrum(point_at(*b, -2.0))[0] == doctest::Approx(2.0));
    for (double lam : {0.5, 1.0, 2.0, 3.5}) {
        const auto ref = oracle::oscillator_eigenvalues(lam, 6);
        for (double sgn : {-1.0, 1.0}) {
            const auto spec = b->spectrum(point_at(*b, sgn * lam));
            for (int k = 0; k < 6; ++k) CHECK(std::abs(spec[k] - ref[k]) < 1e-6);
            for (int k = 1; k < 6; ++k) CHECK(spec[k] > spec[k - 1]);
        }
    }
}

TEST_CASE("rockland and sobolev weight symbols") {
    const auto a = make_abelian_backend(1, 4.0, 9);
    const auto ra = rockland_symbol(a);
    CHECK(ra.order() == 2.0);
    CHECK(ra.at(0, point_at(*a, 2.0)) == cplx(4.0, 0.0));
    CHECK(sobolev_weight(a, 2.0).at(0, point_at(*a, 1.0)).real() == doctest::Approx(2.0));

    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 3);
    const auto rh = rockland_symbol(h);
    const auto p1 = point_at(*h, 1.0);
    const CMatrix expected = Eigen::Vector3cd(1.0, 3.0, 5.0).asDiagonal();
    CHECK((CMatrix(rh.block(0, p1)) - expected).norm() < 1e-12);
    for (std::size_t p = 0; p < h->num_points(); ++p) {
        const CMatrix blk = rh.block(0, p);
        CHECK((blk - blk.adjoint()).norm() == 0.0);
        for (int k = 0; k < 3; ++k) CHECK(blk(k, k).real() >= 0.0);
    }
    const auto w1 = sobolev_weight(h, 1.0);
    CHECK(w1.at(0, p1, 1, 1).real() == doctest::Approx(2.0));
    const auto w0 = sobolev_weight(h, 0.0);
    CHECK(max_abs_difference(w0, Symbol::identity(h)) < 1e-15);
}

TEST_CASE("plancherel inner product of unit modes") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 3);
    const auto p1 = point_at(*h, 1.0), p2 = point_at(*h, 2.0);
    FourierField u(h), w(h), v(h);
    u.at(p1, 0, 0) = 1.0;
    w.at(p1, 1, 0) = 1.0;
    v.at(p2, 0, 0) = 1.0;
    CHECK(plancherel_inner(*h, u, u).real() == doctest::Approx(h->weight(p1)));
    CHECK(std::abs(plancherel_inner(*h, u, w)) == 0.0);
    CHECK(std::abs(plancherel_inner(*h, u, v)) == 0.0);
    // conjugate-linear in the second slot
    const cplx c(0.3, -1.2);
    CHECK(std::abs(plancherel_inner(*h, u, c * u) - std::conj(c) * h->weight(p1)) < 1e-15);

    FourierField other(make_heisenberg_backend(0.5, 4.0, 8, 4));
    CHECK_THROWS_AS(plancherel_inner(*h, u, other), Error);
}

TEST_CASE("sobolev norm of a single mode and monotonicity in s") {
    const auto h = make_heisenberg_backend(0.5, 4.0, 8, 4);
    const auto p1 = point_at(*h, 1.0);
    const cplx c(0.6, 0.8);
    FourierField u(h);
    u.at(p1, 0, 0) = c;
    CHECK(sobolev_norm(*h, u, 1.0) == doctest::Approx(std::sqrt(h->weight(p1)) * std::sqrt(2.0) * std::abs(c)));
    CHECK(sobolev_norm(*h, u, 0.0) == doctest::Approx(std::sqrt(plancherel_inner(*h, u, u).real())));

    std::uint64_t state = 7;
    auto rnd = [&] {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return double(state >> 11) / double(1ULL << 53) - 0.5;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const auto r = FourierField::from_function(h, [&](std::size_t, std::size_t, std::size_t) { return cplx(rnd(), rnd()); });
        double prev = 0.0;
        for (double s : {-2.0, -0.5, 0.0, 0.5, 1.0, 3.0}) {
            const double n = sobolev_norm(*h, r, s);
            CHECK(n >= prev);
            prev = n;
        }
        CHECK(plancherel_inner(*h, r, r).real() > 0.0);
    }
    CHECK(plancherel_inner(*h, FourierField(h), FourierField(h)).real() == 0.0);
}

TEST_CASE("norms are stable under grid refinement") {
    auto norm_at = [](int n_xi) {
        const auto b = make_abelian_backend(1, 12.0, n_xi);
        const auto u = FourierField::from_function(
            b, [&](std::size_t p, std::size_t, std::size_t) { return cplx(std::exp(-0.5 * b->xi(p) * b->xi(p))); });
        return sobolev_norm(*b, u, 1.0);
    };
    const double coarse = norm_at(129), fine = norm_at(257);
    CHECK(std::abs(coarse - fine) / fine < 0.01);

    auto heis_norm = [](double lambda_min, int n_lambda, int N) {
        const auto h = make_heisenberg_backend(lambda_min, 6.0, n_lambda, N);
        const auto u = FourierField::from_function(h, [&](std::size_t p, std::size_t i, std::size_t j) {
            if (i != j) return cplx{};
            const double lam = std::abs(h->lambda(p));
            return cplx(lam * std::exp(-h->spectrum(p)[i]));
        });
        return sobolev_norm(*h, u, 0.0);
    };
    const double base = heis_norm(0.2, 200, 8);
    CHECK(std::abs(heis_norm(0.2, 400, 8) - base) / base < 0.01);
    CHECK(std::abs(heis_norm(0.1, 200, 8) - base) / base < 0.01);
    CHECK(std::abs(heis_norm(0.2, 200, 16) - base) / base < 0.01);
}
