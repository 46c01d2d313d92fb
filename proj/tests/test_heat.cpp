#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coneflow/heat.hpp"

using namespace coneflow;

namespace {

constexpr double kLn2 = 0.6931471805599453094;

// flat cone of order beta, truncated at k_max
ConeMetric flat_cone(double beta, int k_max, double w_max, int n_w, int n_theta) {
    GridSpec g(-double(k_max), w_max, n_w, n_theta);
    return ConeMetric(ConeChart(beta, k_max), ScalarField(g), ScalarField(g), 2.0 + 2.0 * beta);
}

// flat cylinder gauge: e^{2 w~} = rho^{-2} makes the Laplacian constant
// coefficient in (w, theta)
ConeMetric flat_cylinder(int k_max, int n_w, int n_theta) {
    GridSpec g(-double(k_max), 0.0, n_w, n_theta);
    ScalarField bg = ScalarField::sample(g, [](double w, double) { return -w * kLn2; });
    return ConeMetric(ConeChart(0.0, k_max), std::move(bg), ScalarField(g), 2.0);
}

HeatProblem constant_problem(ConeMetric m, double a, double f, double u0, double T, double dt) {
    const GridSpec& g = m.grid();
    return HeatProblem(std::move(m), SpaceTimeField::constant(ScalarField(g, a)),
                       SpaceTimeField::constant(ScalarField(g, f)), ScalarField(g, u0), T, dt);
}

}  // namespace

TEST_CASE("problem validation") {
    ConeMetric m = flat_cone(0.0, 4, 0.0, 41, 8);
    const GridSpec& g = m.grid();
    CHECK_THROWS_AS(constant_problem(flat_cone(0.0, 4, 0.0, 41, 8), 1, 0, 0, -1.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(HeatProblem(flat_cone(0.0, 4, 0.0, 41, 8),
                                SpaceTimeField::constant(ScalarField(g, -0.5)),
                                SpaceTimeField::constant(ScalarField(g)), ScalarField(g), 1.0,
                                0.1),
                    std::invalid_argument);
}

TEST_CASE("constant initial data stays put") {
    HeatProblem p = constant_problem(flat_cone(0.0, 4, 0.0, 41, 8), 1.0, 0.0, 5.0, 0.5, 0.05);
    SpaceTimeField u = solve_truncated(p, 4);
    for (std::size_t n = 0; n < u.size(); ++n) {
        ScalarField diff = u.frame(n) - ScalarField(u.grid(), 5.0);
        CHECK(diff.max_abs() <= 1e-12);
    }
}

TEST_CASE("space-constant forcing gives u = t exactly") {
    HeatProblem p = constant_problem(flat_cone(1.0, 4, 0.0, 41, 8), 1.0, 1.0, 0.0, 1.0, 0.05);
    SpaceTimeField u = solve_truncated(p, 4);
    for (std::size_t n = 0; n < u.size(); ++n) {
        ScalarField diff = u.frame(n) - ScalarField(u.grid(), u.times()[n]);
        CHECK(diff.max_abs() <= 1e-10);
    }
    MaxPrincipleReport tight = check_max_principle(u, 0.0, 1.0);
    CHECK(tight.pass);
    CHECK(std::abs(tight.margin) <= 1e-10);
    CHECK_FALSE(check_max_principle(u, 0.0, 0.5).pass);  // adversarial C2
}

TEST_CASE("sin(theta) decays at the discrete eigenvalue rate") {
    ConeMetric m = flat_cylinder(4, 41, 16);
    const GridSpec& g = m.grid();
    ScalarField u0 = ScalarField::sample(g, [](double, double t) { return std::sin(t); });
    // sin is an exact eigenfunction of the stencil; read the eigenvalue off
    ScalarField lap = laplacian_background(m, u0, BoundaryStencil::neumann);
    const double lam = -lap.at(g.n_w / 2, 1) / u0.at(g.n_w / 2, 1);
    CHECK(lam > 0.0);

    const double T = 0.5, dt = 1e-3;
    HeatProblem p(std::move(m), SpaceTimeField::constant(ScalarField(g, 1.0)),
                  SpaceTimeField::constant(ScalarField(g)), u0, T, dt);
    SpaceTimeField u = solve_truncated(p, 4);
    const double measured_rate = -std::log(u.frame(u.size() - 1).max_abs()) / T;
    CHECK(measured_rate == doctest::Approx(lam).epsilon(0.01));
    CHECK(check_max_principle(u, 1.0, 0.0).pass);
}

TEST_CASE("degenerate a == 0 integrates the forcing") {
    HeatProblem p = constant_problem(flat_cone(0.5, 4, 0.0, 41, 8), 0.0, 2.0, 1.0, 0.3, 0.03);
    SpaceTimeField u = solve_truncated(p, 4);
    ScalarField diff = u.frame(u.size() - 1) - ScalarField(u.grid(), 1.0 + 2.0 * 0.3);
    CHECK(diff.max_abs() <= 1e-12);
}

TEST_CASE("mass is conserved without forcing") {
    ConeMetric m = flat_cone(1.0, 4, 1.0, 51, 8);
    const GridSpec& g = m.grid();
    ScalarField u0 = ScalarField::sample(g, [](double w, double t) {
        return std::exp(-(w + 1.5) * (w + 1.5)) * (1.0 + 0.2 * std::cos(t));
    });
    HeatProblem p(m, SpaceTimeField::constant(ScalarField(g, 1.0)),
                  SpaceTimeField::constant(ScalarField(g)), u0, 0.2, 0.02);
    SpaceTimeField u = solve_truncated(p, 4);
    const double m0 = integrate(m, u.frame(0));
    for (std::size_t n = 1; n < u.size(); ++n)
        CHECK(integrate(m, u.frame(n)) == doctest::Approx(m0).epsilon(1e-11));
}

TEST_CASE("backward Euler is stable and first-order in dt") {
    ConeMetric m = flat_cone(1.0, 6, 0.0, 61, 8);
    const GridSpec& g = m.grid();
    ScalarField u0 = ScalarField::sample(g, [](double w, double t) {
        return std::sin(w) + 0.3 * std::cos(t);
    });
    ScalarField f = ScalarField::sample(g, [](double w, double) { return std::exp(w); });
    auto at_T = [&](double dt) {
        HeatProblem p(m, SpaceTimeField::constant(ScalarField(g, 1.0)),
                      SpaceTimeField::constant(f), u0, 0.1, dt);
        SpaceTimeField u = solve_truncated(p, 6);
        CHECK(check_max_principle(u, u0.max_abs(), f.max_abs()).pass);
        return u.frame(u.size() - 1);
    };
    ScalarField a = at_T(1e-2), b = at_T(5e-3), c = at_T(2.5e-3);
    const double d1 = (a - b).max_abs(), d2 = (b - c).max_abs();
    CHECK(d1 / d2 >= 1.7);
    CHECK(d1 / d2 <= 2.3);
}

TEST_CASE("truncation study on smooth off-cone data") {
    ConeMetric m = flat_cone(0.0, 8, 2.0, 101, 8);
    const GridSpec& g = m.grid();
    ScalarField u0 = ScalarField::sample(g, [](double w, double) {
        const double x = (w - 1.0) / 0.8;
        return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    });
    HeatProblem p(m, SpaceTimeField::constant(ScalarField(g, 1.0)),
                  SpaceTimeField::constant(ScalarField(g)), u0, 0.1, 0.01);
    auto [deep, study] = solve_singular(p, {4, 6, 8});
    REQUIRE(study.sup_gaps.size() == 2);
    CHECK(study.sup_gaps[1] < study.sup_gaps[0]);
    CHECK(study.sup_gaps[1] < study.sup_gaps[0] / 2.0);
    CHECK(study.converging);
    CHECK(deep.grid().w_min == -8.0);
}

TEST_CASE("constant data makes all levels identical") {
    ConeMetric m = flat_cone(1.0, 8, 0.0, 81, 8);
    HeatProblem p = constant_problem(std::move(m), 1.0, 0.0, 3.0, 0.1, 0.01);
    auto [deep, study] = solve_singular(p, {4, 6, 8});
    for (double gap : study.sup_gaps) CHECK(gap <= 1e-12);
}

TEST_CASE("bump forcing: deepest two levels agree on the outer band") {
    ConeMetric m = flat_cone(1.0, 8, 0.0, 161, 8);
    const GridSpec& g = m.grid();
    ScalarField f = ScalarField::sample(g, [](double w, double) {
        const double x = (w + 1.0) / 0.7;
        return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
    });
    HeatProblem p(m, SpaceTimeField::constant(ScalarField(g, 1.0)), SpaceTimeField::constant(f),
                  ScalarField(g), 0.1, 0.01);
    SpaceTimeField u6 = solve_truncated(p, 6);
    SpaceTimeField u8 = solve_truncated(p, 8);
    double gap = 0.0;
    for (std::size_t n = 0; n < u6.size(); ++n)
        gap = std::max(gap, (truncate_field(u6.frame(n), 3) - truncate_field(u8.frame(n), 3))
                                .max_abs());
    CHECK(gap < 1e-4);
}

TEST_CASE("energy hand values") {
    ConeMetric m = flat_cone(0.0, 2, 0.0, 41, 16);
    CHECK(energy(m, ScalarField(m.grid(), 7.0)) == 0.0);
    ScalarField w_field = ScalarField::sample(m.grid(), [](double w, double) { return w; });
    CHECK(energy(m, w_field) == doctest::Approx(4.0 * M_PI / kLn2).epsilon(1e-12));
    // conformal invariance: the u- and w~-factors drop out exactly
    ConeMetric scaled(m.chart, m.background + ScalarField(m.grid(), 1.3),
                      ScalarField(m.grid(), -0.7), m.euler);
    CHECK(energy(scaled, w_field) == energy(m, w_field));
}

TEST_CASE("energy growth bound") {
    ConeMetric m = flat_cone(0.0, 4, 1.0, 51, 8);
    const GridSpec& g = m.grid();
    // constant forcing: gradient-free, u stays space-constant
    HeatProblem pc = constant_problem(m, 1.0, 2.0, 0.0, 0.5, 0.05);
    SpaceTimeField uc = solve_truncated(pc, 4);
    EnergyGrowthReport rc = check_energy_growth(pc, uc);
    CHECK(rc.pass);

    ScalarField f = ScalarField::sample(g, [](double w, double t) {
        const double x = (w + 1.0) / 0.8;
        return (std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0) * (1 + 0.5 * std::sin(t));
    });
    HeatProblem pb(m, SpaceTimeField::constant(ScalarField(g, 1.0)), SpaceTimeField::constant(f),
                   ScalarField(g), 0.5, 0.05);
    SpaceTimeField ub = solve_truncated(pb, 4);
    EnergyGrowthReport rb = check_energy_growth(pb, ub);
    CHECK(rb.pass);

    // synthetic violation: scale the solution far past the bound
    std::vector<ScalarField> inflated;
    for (const auto& fr : ub.frames()) {
        ScalarField big = fr;
        big *= 1000.0;
        inflated.push_back(std::move(big));
    }
    EnergyGrowthReport rv = check_energy_growth(pb, SpaceTimeField(ub.times(), inflated));
    CHECK_FALSE(rv.pass);

    CHECK_THROWS_AS(check_energy_growth(constant_problem(m, 1.0, 0.0, 1.0, 0.1, 0.01), ub),
                    std::invalid_argument);
}

TEST_CASE("truncation levels must land on grid rows") {
    ConeMetric m = flat_cone(0.0, 4, 0.0, 41, 8);
    CHECK_THROWS_AS(truncate_metric(m, 5), std::invalid_argument);
    GridSpec odd(-4.0, 0.0, 42, 8);  // h does not divide 1
    CHECK_THROWS_AS(truncate_field(ScalarField(odd), 2), std::invalid_argument);
}
