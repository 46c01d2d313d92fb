#ifndef CONEFLOW_SOLITON_HPP
#define CONEFLOW_SOLITON_HPP

#include <cmath>
#include <vector>

#include "coneflow/surface.hpp"

namespace coneflow {

// One accepted integrator sample of the radial system A = r u', B = r e^{2u}.
struct ProfileSample {
    double r;
    double u;
    double A;
    double B;
};

enum class StopReason { b_below_eps, r_max_hit, step_underflow };

// One trajectory of the (A, B, u) system for shooting parameter c, with the
// limit coefficient A_c and area 2*pi*int B dr accumulated alongside.
struct SolitonProfile {
    double c;
    std::vector<ProfileSample> samples;
    double A_limit;
    double tail_uncertainty;
    bool limit_reliable;
    double r_stop;
    StopReason stop_reason;
    double area;
};

// Power-series launch near the regular singular point r = 0:
// u = -(1+c) r^2/4 + (1+c)(1+2c) r^4/32 + O(r^6).
struct SeriesState {
    double u;
    double u_prime;
    double A;
    double B;
};

SeriesState series_start(double c, double r_start);

struct IntegrateOptions {
    double r_max = 1e6;
    double eps_B = 1e-12;
    double tol = 1e-10;
    double r_start = 0.0;  // 0 = choose automatically from c
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 4(5)) on
// A' = -B(cA + c + 1), B' = B(2A + 1)/r, u' = A/r, with the series launch
// selecting the u(0) = 0 branch. Stops when r*B < eps_B with negligible A',
// or at r_max. c = -1 returns the exact closed form u = 0, B = r.
SolitonProfile integrate_profile(double c, const IntegrateOptions& opts = {});

// A_c = lim A(r), with a power-law tail correction estimated from the
// measured decay B ~ r^p; uncertainty equals the applied tail bound.
std::pair<double, double> limit_coefficient(const SolitonProfile& profile);

// Root-find c with A_c = -(beta + 2) by sign bracketing expanded from
// (-0.5, 1) toward c = -1 and c = +infinity.
std::pair<double, SolitonProfile> shoot_for_beta(double beta, double tol_beta,
                                                 const IntegrateOptions& opts = {});

// Sup over samples of |R - 2 - (2c + 2cA)| with R reconstructed from the
// integrated state (u'' from the ODE right side, never differenced).
double soliton_residual(const SolitonProfile& profile, double c);

// Min over samples of K = -e^{-2u} A'(r)/r, A' from the ODE right side.
double curvature_min(const SolitonProfile& profile);

// Football built from the order-lambda base profile, lambda =
// (beta1+1)/(beta2+1) - 1, with theta rescaled by beta2 + 1.
struct FootballMetric {
    double beta1;
    double beta2;
    double lambda;
    double c;
    SolitonProfile base;
    double angular_factor;  // beta2 + 1

    double angle1() const { return 2.0 * M_PI * (beta1 + 1.0); }  // r = infinity end
    double angle2() const { return 2.0 * M_PI * (beta2 + 1.0); }  // r = 0 end
    double total_area() const { return angular_factor * base.area; }
};

FootballMetric construct_football(double beta1, double beta2, double tol_beta,
                                  const IntegrateOptions& opts = {});

// Resample a profile onto a cone chart at the r = infinity end
// (rho = r^{-(lambda+1)} / (beta+1)); angular_factor != 1 exports the glued
// football. Returns the metric and its exact base curvature field.
struct ExportedMetric {
    ConeMetric metric;
    ScalarField K0;
};

ExportedMetric export_as_cone_metric(const SolitonProfile& profile, const GridSpec& grid,
                                     double angular_factor = 1.0);

}  // namespace coneflow

#endif
