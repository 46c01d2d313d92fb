#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "coneflow/coords.hpp"

using namespace coneflow;

TEST_CASE("divisor validates entries") {
    Divisor d({{"p1", -0.5}, {"p2", 1.0}});
    CHECK(d.beta_sum() == doctest::Approx(0.5));
    CHECK(d.cone_angle(0) == doctest::Approx(M_PI));
    CHECK(d.cone_angle(1) == doctest::Approx(4.0 * M_PI));
    CHECK_THROWS_AS(Divisor({{"p", -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Divisor({{"p", 0.0}, {"p", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Divisor({{"a", 0.0}, {"b", 0.0}, {"c", 0.0}}), std::invalid_argument);
}

TEST_CASE("cone chart stores exact dyadic cut") {
    ConeChart ch(1.0, 6);
    CHECK(ch.rho_cut() == std::ldexp(1.0, -6));
    CHECK(ch.sigma() * (ch.beta + 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(ConeChart(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(ConeChart(0.0, 0), std::invalid_argument);
}

TEST_CASE("grid spec invariants") {
    GridSpec g(-4.0, 0.0, 16, 8);
    CHECK(g.h_w() == doctest::Approx(4.0 / 15.0));
    CHECK(g.h_theta() == doctest::Approx(2.0 * M_PI / 8.0));
    CHECK(g.w(0) == -4.0);
    CHECK(g.w(15) == doctest::Approx(0.0));
    CHECK_THROWS_AS(GridSpec(-4.0, 0.0, 4, 8), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(-4.0, 0.0, 16, 4), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(1.0, 0.0, 16, 8), std::invalid_argument);
}

TEST_CASE("rho_of_r hand values") {
    CHECK(rho_of_r(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(rho_of_r(0.0, 3.7) == 0.0);
    CHECK(rho_of_r(2.0, 1.0) == doctest::Approx(2.0));  // 2^2 / 2
    CHECK_THROWS_AS(rho_of_r(1.0, -1.0), std::domain_error);
}

TEST_CASE("rho <-> r round trip") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> rdist(1e-3, 1e3), bdist(-0.99, 5.0);
    for (int n = 0; n < 1000; ++n) {
        const double r = rdist(rng), beta = bdist(rng);
        const double rho = rho_of_r(r, beta);
        const double back = r_of_rho(rho, beta);
        // 8 ulps scaled by the log-range condition number of pow
        const double cond = 1.0 + std::abs(std::log2(rho)) + std::abs(std::log2(r));
        CHECK(std::abs(back - r) <= 8.0 * 1e-16 * std::abs(r) * cond);
    }
}

TEST_CASE("w_of_rho exact dyadics and library-free value") {
    CHECK(w_of_rho(1.0) == 0.0);
    CHECK(w_of_rho(0.125) == -3.0);
    for (int k = 1; k <= 40; ++k) CHECK(w_of_rho(std::ldexp(1.0, -k)) == double(-k));
    CHECK(w_of_rho(0.3) == doctest::Approx(std::log(0.3) / std::log(2.0)).epsilon(1e-14));
    CHECK(rho_of_w(w_of_rho(0.3)) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK_THROWS_AS(w_of_rho(0.0), std::domain_error);
    CHECK_THROWS_AS(w_of_rho(-1.0), std::domain_error);
}

TEST_CASE("w_of_rho strictly increasing") {
    double prev = -1e300;
    for (double rho = 1e-6; rho <= 1.0; rho *= 1.37) {
        const double w = w_of_rho(rho);
        CHECK(w > prev);
        prev = w;
    }
}

static bool hits_contain(const std::vector<AnnulusHit>& hits, int k) {
    for (const auto& h : hits)
        if (h.k == k) return true;
    return false;
}

TEST_CASE("annulus membership hand cases") {
    auto half = annulus_of(0.5);  // dyadic boundary: only k=1 has s interior
    REQUIRE(half.size() == 1);
    CHECK(half[0].k == 1);
    CHECK(half[0].s == doctest::Approx(1.0));

    auto p7 = annulus_of(0.7);
    REQUIRE(p7.size() == 1);
    CHECK(p7[0].k == 1);
    CHECK(p7[0].s == doctest::Approx(1.4));

    auto deep = annulus_of(std::ldexp(1.5, -10));
    CHECK(hits_contain(deep, 10));
    CHECK(hits_contain(deep, 9));

    CHECK_THROWS_AS(annulus_of(0.0), std::domain_error);
    CHECK_THROWS_AS(annulus_of(1.5), std::domain_error);
}

TEST_CASE("annulus covering property") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double rho = std::pow(2.0, -14.0 * u(rng));  // spread across scales
        if (rho >= 1.0) continue;
        auto hits = annulus_of(rho);
        CHECK(hits.size() >= 1);
        for (const auto& h : hits) {
            CHECK(h.s > 0.5);
            CHECK(h.s < 2.0);
            CHECK(h.s == doctest::Approx(std::ldexp(rho, h.k)));
        }
    }
}
