#ifndef CONEFLOW_FLOW_HPP
#define CONEFLOW_FLOW_HPP

#include "coneflow/heat.hpp"
#include "coneflow/surface.hpp"

namespace coneflow {

// Normalized Ricci flow in conformal gauge, u_t = e^{-2u} Lap_{g0} u +
// r_const/2 - e^{-2u} K0, advanced window by window through the linearized
// map Psi (picard_map below).
struct FlowProblem {
    ConeMetric g0;
    ScalarField K0;
    double r_const;
    double T;
    double dt;
    double picard_tol = 1e-10;
    int picard_max = 40;
    double sup_guard = 10.0;          // abort if sup|u| ever exceeds this
    double volume_drift_bound = 0.01;  // relative drift beyond this is flagged

    FlowProblem(ConeMetric g0_, ScalarField K0_, double r_const_, double T_, double dt_);
};

// Average of the scalar curvature 2 K0 of g0; the volume-preserving choice
// of r_const.
double auto_r_const(const ConeMetric& g0, const ScalarField& K0);

struct FlowLedgerEntry {
    double t;
    double volume;
    double gb_integral;    // integral of K_t dA_t
    double boundary_flux;  // line integral of |grad u| at the truncation circle
    double sup_u;
    int picard_iters;
    bool volume_flagged;
};

struct FlowTrajectory {
    SpaceTimeField u;
    std::vector<FlowLedgerEntry> ledger;
};

// One application of the frozen-coefficient map: solves the linear problem
// u_t = e^{-2v} Lap_{g0} u + (r_const/2 - e^{-2v} K0) over the window
// [0, dt] with initial value v(0). Window-local times.
SpaceTimeField picard_map(const FlowProblem& problem, const SpaceTimeField& v);

// Windows of length dt; in each, picard_map is iterated from the previous
// u until the endpoint sup-change drops below picard_tol (picard_max hit is
// an error carrying the last residual). Ledgers are recorded at every
// window boundary including t = 0.
FlowTrajectory run_flow(const FlowProblem& problem);

struct BoundaryFluxReport {
    double flux;        // line integral of |grad_g u|_g along the innermost circle
    double circle_max;  // max over the circle of |rho d_rho u| + |d_theta u|
};

BoundaryFluxReport boundary_flux(const ConeMetric& metric, const ScalarField& u);

}  // namespace coneflow

#endif
