#ifndef CONEFLOW_HEAT_HPP
#define CONEFLOW_HEAT_HPP

#include "coneflow/spacetime.hpp"
#include "coneflow/surface.hpp"

namespace coneflow {

// u_t = a(x,t) Laplacian_g u + f(x,t) on the truncated surface with
// Neumann data at the w boundaries. a must be nonnegative everywhere.
struct HeatProblem {
    ConeMetric metric;
    SpaceTimeField a;
    SpaceTimeField f;
    ScalarField u0;
    double T;
    double dt;

    HeatProblem(ConeMetric metric_, SpaceTimeField a_, SpaceTimeField f_, ScalarField u0_,
                double T_, double dt_);
};

struct TruncationStudy {
    std::vector<int> levels;
    std::vector<double> sup_gaps;  // one per adjacent level pair
    bool converging;               // gaps non-increasing across the last two pairs
};

// Backward-Euler stepping on the level-k truncation (rows w >= -k). Each
// implicit system is solved iteratively to relative residual 1e-10. Frames
// are recorded at every step, including t = 0.
SpaceTimeField solve_truncated(const HeatProblem& problem, int k);

// Runs solve_truncated along the schedule, returns the deepest solution
// and sup-norm gaps between adjacent levels on the common band
// w >= -levels.front().
std::pair<SpaceTimeField, TruncationStudy> solve_singular(const HeatProblem& problem,
                                                          const std::vector<int>& k_schedule);

struct MaxPrincipleReport {
    double margin;  // max over frames of max|u(.,t)| - C1 - C2*t
    bool pass;      // margin <= 1e-9
};

MaxPrincipleReport check_max_principle(const SpaceTimeField& solution, double C1, double C2);

// Dirichlet energy of field with respect to the metric; conformally
// invariant in 2D, so only the cone structure enters.
double energy(const ConeMetric& metric, const ScalarField& field);

struct EnergyGrowthReport {
    double worst_excess;  // max over t of energy(u) - (e^t - 1) * max_t energy(f)
    bool pass;            // worst_excess <= 1e-8
};

EnergyGrowthReport check_energy_growth(const HeatProblem& problem,
                                       const SpaceTimeField& solution);

// Restriction of a metric to rows with w >= -k; -k must land on a grid row.
ConeMetric truncate_metric(const ConeMetric& metric, int k);
ScalarField truncate_field(const ScalarField& field, int k);

}  // namespace coneflow

#endif
