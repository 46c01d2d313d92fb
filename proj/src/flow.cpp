#include "coneflow/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace coneflow {

namespace {
constexpr double kLn2 = 0.6931471805599453094;

// fold the conformal part of g0 into the background so that the flow's u is
// the whole conformal factor relative to g0
ConeMetric folded(const ConeMetric& g0) {
    return ConeMetric(g0.chart, g0.background + g0.conformal, ScalarField(g0.grid()), g0.euler);
}

ScalarField exp_neg2(const ScalarField& v) {
    ScalarField out = v;
    for (double& x : out.values()) x = std::exp(-2.0 * x);
    return out;
}
}  // namespace

FlowProblem::FlowProblem(ConeMetric g0_, ScalarField K0_, double r_const_, double T_, double dt_)
    : g0(std::move(g0_)), K0(std::move(K0_)), r_const(r_const_), T(T_), dt(dt_) {
    require_same_grid(g0.background, K0, "FlowProblem");
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("FlowProblem: T and dt must be positive");
}

double auto_r_const(const ConeMetric& g0, const ScalarField& K0) {
    const double V = area(g0);
    if (!(V > 0.0)) throw std::invalid_argument("auto_r_const: metric has nonpositive volume");
    return 2.0 * integrate(g0, K0) / V;
}

SpaceTimeField picard_map(const FlowProblem& problem, const SpaceTimeField& v) {
    require_same_grid(problem.g0.background, v.frames().front(), "picard_map");
    const double delta = problem.dt;

    std::vector<double> times;
    std::vector<ScalarField> a_frames, f_frames;
    auto push = [&](double t, const ScalarField& vt) {
        ScalarField a = exp_neg2(vt);
        ScalarField f = a;
        for (std::size_t n = 0; n < f.values().size(); ++n)
            f.values()[n] = problem.r_const / 2.0 - a.values()[n] * problem.K0.values()[n];
        times.push_back(t);
        a_frames.push_back(std::move(a));
        f_frames.push_back(std::move(f));
    };
    if (v.size() == 1) {
        push(0.0, v.frame(0));
    } else {
        for (std::size_t n = 0; n < v.size(); ++n) push(v.times()[n], v.frame(n));
    }

    HeatProblem linear(folded(problem.g0), SpaceTimeField(times, a_frames),
                       SpaceTimeField(times, f_frames), v.frame(0), delta, delta);
    return solve_truncated(linear, problem.g0.chart.k_max);
}

BoundaryFluxReport boundary_flux(const ConeMetric& metric, const ScalarField& u) {
    require_same_grid(metric.background, u, "boundary_flux");
    const GridSpec& g = u.grid();
    const double b1 = metric.chart.beta + 1.0;
    double flux = 0.0, cmax = 0.0;
    for (int j = 0; j < g.n_theta; ++j) {
        const double rdu = u.dw(0, j) / kLn2;  // rho d_rho u
        const double tdu = u.dtheta(0, j);
        flux += std::sqrt(b1 * b1 * rdu * rdu + tdu * tdu) * g.h_theta();
        cmax = std::max(cmax, std::abs(rdu) + std::abs(tdu));
    }
    return {flux, cmax};
}

FlowTrajectory run_flow(const FlowProblem& problem) {
    const ConeMetric base = folded(problem.g0);
    const GridSpec& g = base.grid();
    const int n_windows = std::max(1, int(std::llround(problem.T / problem.dt)));
    FlowProblem prob = problem;
    prob.dt = problem.T / n_windows;

    ScalarField u(g);
    std::vector<double> times{0.0};
    std::vector<ScalarField> frames{u};
    std::vector<FlowLedgerEntry> ledger;

    double V0 = 0.0;
    auto record = [&](double t, int iters) {
        ConeMetric mt(base.chart, base.background, u, base.euler);
        const double V = area(mt);
        if (t == 0.0) V0 = V;
        ScalarField Kt = gauss_curvature(mt, problem.K0);
        FlowLedgerEntry e;
        e.t = t;
        e.volume = V;
        e.gb_integral = integrate(mt, Kt);
        e.boundary_flux = boundary_flux(mt, u).flux;
        e.sup_u = u.max_abs();
        e.picard_iters = iters;
        e.volume_flagged = std::abs(V - V0) > problem.volume_drift_bound * V0;
        ledger.push_back(e);
        if (e.sup_u > problem.sup_guard)
            throw std::runtime_error("run_flow: sup|u| exceeded the guard bound at t = " +
                                     std::to_string(t));
    };
    record(0.0, 0);

    for (int win = 1; win <= n_windows; ++win) {
        SpaceTimeField v = SpaceTimeField::constant(u);
        ScalarField prev_end = u;
        int iters = 0;
        double resid = std::numeric_limits<double>::infinity();
        while (true) {
            SpaceTimeField w = picard_map(prob, v);
            const ScalarField& end = w.frame(w.size() - 1);
            resid = (end - prev_end).max_abs();
            prev_end = end;
            ++iters;
            if (resid < prob.picard_tol) {
                u = end;
                break;
            }
            if (iters >= prob.picard_max)
                throw std::runtime_error("run_flow: window " + std::to_string(win) +
                                         " failed to contract; last residual " +
                                         std::to_string(resid));
            v = std::move(w);
        }
        times.push_back(win * prob.dt);
        frames.push_back(u);
        record(win * prob.dt, iters);
    }
    return {SpaceTimeField(std::move(times), std::move(frames)), std::move(ledger)};
}

}  // namespace coneflow
