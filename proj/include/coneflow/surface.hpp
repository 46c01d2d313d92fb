#ifndef CONEFLOW_SURFACE_HPP
#define CONEFLOW_SURFACE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "coneflow/coords.hpp"

namespace coneflow {

// Sampled function on a (w, theta) cylinder grid. theta-periodic: index
// n_theta wraps to 0. Values must stay finite.
class ScalarField {
public:
    ScalarField(GridSpec grid, double fill = 0.0);
    ScalarField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    double& at(int i, int j) { return values_[idx(i, j)]; }
    double at(int i, int j) const { return values_[idx(i, j)]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double max_abs() const;
    void check_finite() const;

    static ScalarField sample(const GridSpec& grid,
                              const std::function<double(double w, double theta)>& f);

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    // w-derivatives by second-order differences (centered; one-sided at rows
    // 0 and n_w-1). theta always periodic centered.
    double dw(int i, int j) const;
    double dtheta(int i, int j) const;

private:
    std::size_t idx(int i, int j) const {
        j %= grid_.n_theta;
        if (j < 0) j += grid_.n_theta;
        return std::size_t(i) * grid_.n_theta + j;
    }

    GridSpec grid_;
    std::vector<double> values_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where);

// Cone metric g = e^{2u} g0 with g0 = e^{2 w~}(d rho^2 + (beta+1)^2 rho^2
// d theta^2) on the chart's cylinder grid. `background` is w~, `conformal`
// is u. euler is chi~ = chi(S) + sum beta_i.
struct ConeMetric {
    ConeChart chart;
    ScalarField background;
    ScalarField conformal;
    double euler;

    ConeMetric(ConeChart chart_, ScalarField background_, ScalarField conformal_, double euler_);

    const GridSpec& grid() const { return background.grid(); }
};

// Divisor plus chart bookkeeping for a sphere with truncated cone ends;
// smooth poles are modeled as beta = 0 ends. The geometry itself lives in
// the ConeMetric on a single cylinder.
struct SurfaceModel {
    Divisor divisor;
    std::vector<ConeChart> ends;

    SurfaceModel(Divisor divisor_, std::vector<ConeChart> ends_);
};

enum class BoundaryStencil {
    one_sided,  // second-order one-sided second differences at w edges
    neumann     // ghost-point reflection, d/dnu = 0
};

// Laplacian of the flat cone rho^{-2} [ (ln 2)^{-2} d^2_w + (beta+1)^{-2}
// d^2_theta ] applied to `field` (no conformal factors).
ScalarField cone_operator(double beta, const ScalarField& field,
                          BoundaryStencil bs = BoundaryStencil::one_sided);

// Laplacian of g0 = e^{2 w~} (cone): e^{-2 w~} * cone_operator.
ScalarField laplacian_background(const ConeMetric& metric, const ScalarField& field,
                                 BoundaryStencil bs = BoundaryStencil::one_sided);

// Full metric Laplacian of g = e^{2u} g0.
ScalarField cone_laplacian(const ConeMetric& metric, const ScalarField& field,
                           BoundaryStencil bs = BoundaryStencil::one_sided);

// K0 of the background metric g0, from w~: K0 = -e^{-2 w~} cone_op(w~).
ScalarField compute_base_curvature(const ConeMetric& metric);

// K_t = e^{-2u}(-Laplacian_{g0} u + K0). If K0 is not supplied it is
// computed from the background factor.
ScalarField gauss_curvature(const ConeMetric& metric,
                            const std::optional<ScalarField>& K0 = std::nullopt);

// Integral of field dA_g over the truncated cylinder. Trapezoid in w,
// rectangle rule in theta, compensated summation in fixed w-major order.
double integrate(const ConeMetric& metric, const ScalarField& field);

double area(const ConeMetric& metric);

// integral K dA - 2*pi*euler over the truncated grid.
double gauss_bonnet_defect(const ConeMetric& metric,
                           const std::optional<ScalarField>& K0 = std::nullopt);

// Constant-curvature (K = 1) metric with two cone points of equal order
// beta at the two cylinder ends: w~ = log(4(beta+1) / (4 + (beta+1)^2 rho^2)).
// beta = 0 gives the round unit sphere.
ConeMetric constant_curvature_football(double beta, int k_max, double w_max, int n_w,
                                       int n_theta);

}  // namespace coneflow

#endif
