#include "coneflow/surface.hpp"

#include <cmath>
#include <stdexcept>

namespace coneflow {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
}

ScalarField::ScalarField(GridSpec grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("ScalarField: value count does not match grid");
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void ScalarField::check_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite value");
}

ScalarField ScalarField::sample(const GridSpec& grid,
                                const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (int i = 0; i < grid.n_w; ++i)
        for (int j = 0; j < grid.n_theta; ++j) out.at(i, j) = f(grid.w(i), grid.theta(j));
    return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(*this, o, "ScalarField::operator+=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(*this, o, "ScalarField::operator-=");
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double ScalarField::dw(int i, int j) const {
    const double h = grid_.h_w();
    if (i == 0) return (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j)) / (2.0 * h);
    if (i == grid_.n_w - 1)
        return (3.0 * at(i, j) - 4.0 * at(i - 1, j) + at(i - 2, j)) / (2.0 * h);
    return (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
}

double ScalarField::dtheta(int i, int j) const {
    return (at(i, j + 1) - at(i, j - 1)) / (2.0 * grid_.h_theta());
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

ConeMetric::ConeMetric(ConeChart chart_, ScalarField background_, ScalarField conformal_,
                       double euler_)
    : chart(chart_),
      background(std::move(background_)),
      conformal(std::move(conformal_)),
      euler(euler_) {
    require_same_grid(background, conformal, "ConeMetric");
    if (std::abs(background.grid().w_min + chart.k_max) > 1e-12)
        throw std::invalid_argument("ConeMetric: grid w_min must equal -k_max");
    background.check_finite();
    conformal.check_finite();
}

SurfaceModel::SurfaceModel(Divisor divisor_, std::vector<ConeChart> ends_)
    : divisor(std::move(divisor_)), ends(std::move(ends_)) {
    if (ends.size() != divisor.entries().size())
        throw std::invalid_argument(
            "SurfaceModel: one end per divisor entry (smooth poles are beta = 0 entries)");
}

ScalarField cone_operator(double beta, const ScalarField& field, BoundaryStencil bs) {
    const GridSpec& g = field.grid();
    const double hw2 = g.h_w() * g.h_w();
    const double ht2 = g.h_theta() * g.h_theta();
    const double cw = 1.0 / (kLn2 * kLn2);
    const double ct = 1.0 / ((beta + 1.0) * (beta + 1.0));
    ScalarField out(g);
    for (int i = 0; i < g.n_w; ++i) {
        const double rho = rho_of_w(g.w(i));
        const double inv_rho2 = 1.0 / (rho * rho);
        for (int j = 0; j < g.n_theta; ++j) {
            double d2w;
            if (i > 0 && i < g.n_w - 1) {
                d2w = (field.at(i - 1, j) - 2.0 * field.at(i, j) + field.at(i + 1, j)) / hw2;
            } else if (bs == BoundaryStencil::neumann) {
                const int k = (i == 0) ? 1 : g.n_w - 2;
                d2w = 2.0 * (field.at(k, j) - field.at(i, j)) / hw2;
            } else if (i == 0) {
                d2w = (2.0 * field.at(0, j) - 5.0 * field.at(1, j) + 4.0 * field.at(2, j) -
                       field.at(3, j)) /
                      hw2;
            } else {
                d2w = (2.0 * field.at(i, j) - 5.0 * field.at(i - 1, j) +
                       4.0 * field.at(i - 2, j) - field.at(i - 3, j)) /
                      hw2;
            }
            const double d2t =
                (field.at(i, j - 1) - 2.0 * field.at(i, j) + field.at(i, j + 1)) / ht2;
            out.at(i, j) = inv_rho2 * (cw * d2w + ct * d2t);
        }
    }
    return out;
}

ScalarField laplacian_background(const ConeMetric& metric, const ScalarField& field,
                                 BoundaryStencil bs) {
    require_same_grid(metric.background, field, "laplacian_background");
    ScalarField out = cone_operator(metric.chart.beta, field, bs);
    const GridSpec& g = field.grid();
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            out.at(i, j) *= std::exp(-2.0 * metric.background.at(i, j));
    return out;
}

ScalarField cone_laplacian(const ConeMetric& metric, const ScalarField& field,
                           BoundaryStencil bs) {
    ScalarField out = laplacian_background(metric, field, bs);
    const GridSpec& g = field.grid();
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            out.at(i, j) *= std::exp(-2.0 * metric.conformal.at(i, j));
    return out;
}

ScalarField compute_base_curvature(const ConeMetric& metric) {
    ScalarField lap = cone_operator(metric.chart.beta, metric.background);
    const GridSpec& g = lap.grid();
    ScalarField out(g);
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            out.at(i, j) = -std::exp(-2.0 * metric.background.at(i, j)) * lap.at(i, j);
    return out;
}

ScalarField gauss_curvature(const ConeMetric& metric, const std::optional<ScalarField>& K0) {
    ScalarField base = K0 ? *K0 : compute_base_curvature(metric);
    require_same_grid(base, metric.background, "gauss_curvature");
    ScalarField lap = laplacian_background(metric, metric.conformal);
    const GridSpec& g = lap.grid();
    ScalarField out(g);
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            out.at(i, j) =
                std::exp(-2.0 * metric.conformal.at(i, j)) * (base.at(i, j) - lap.at(i, j));
    return out;
}

double integrate(const ConeMetric& metric, const ScalarField& field) {
    require_same_grid(metric.background, field, "integrate");
    const GridSpec& g = field.grid();
    const double beta = metric.chart.beta;
    const double cell = (beta + 1.0) * kLn2 * g.h_w() * g.h_theta();
    double sum = 0.0, comp = 0.0;  // Kahan
    for (int i = 0; i < g.n_w; ++i) {
        const double rho = rho_of_w(g.w(i));
        const double tw = (i == 0 || i == g.n_w - 1) ? 0.5 : 1.0;
        for (int j = 0; j < g.n_theta; ++j) {
            const double da = std::exp(2.0 * (metric.conformal.at(i, j) +
                                              metric.background.at(i, j))) *
                              rho * rho * cell * tw;
            const double term = field.at(i, j) * da;
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    return sum;
}

double area(const ConeMetric& metric) {
    return integrate(metric, ScalarField(metric.grid(), 1.0));
}

double gauss_bonnet_defect(const ConeMetric& metric, const std::optional<ScalarField>& K0) {
    return integrate(metric, gauss_curvature(metric, K0)) - 2.0 * M_PI * metric.euler;
}

ConeMetric constant_curvature_football(double beta, int k_max, double w_max, int n_w,
                                       int n_theta) {
    GridSpec grid(-double(k_max), w_max, n_w, n_theta);
    const double b1 = beta + 1.0;
    ScalarField wt = ScalarField::sample(grid, [&](double w, double) {
        const double rho = rho_of_w(w);
        return std::log(4.0 * b1 / (4.0 + b1 * b1 * rho * rho));
    });
    return ConeMetric(ConeChart(beta, k_max), std::move(wt), ScalarField(grid),
                      2.0 + 2.0 * beta);
}

}  // namespace coneflow
