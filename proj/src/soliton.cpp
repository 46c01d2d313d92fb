#include "coneflow/soliton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace coneflow {

namespace {

// Integration runs in x = ln r with state (A, L = ln B, u, area). In these
// variables d/dx (L - x - 2u) = (2A+1) - 1 - 2A = 0 stage by stage, so every
// Runge-Kutta step preserves the constraint B = r e^{2u} to roundoff.
using State = std::array<double, 4>;  // A, L, u, area

State rhs(double x, const State& y, double c) {
    const double A = y[0], rB = std::exp(x + y[1]);
    return {-rB * (c * A + c + 1.0), 2.0 * A + 1.0, A, 2.0 * M_PI * rB};
}

// Dormand-Prince 4(5) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// cap on relative step size; keeps cubic Hermite resampling between
// accepted steps accurate enough for the flow stationarity checks
constexpr double kMaxRelStep = 0.02;

// decay exponent of B ~ C r^p over the last decade of samples; +inf when
// not measurable
double measured_decay(const SolitonProfile& p) {
    const auto& s = p.samples;
    const ProfileSample& end = s.back();
    if (end.B <= 0.0) return std::numeric_limits<double>::infinity();
    std::size_t mid = s.size() - 1;
    while (mid > 0 && s[mid].r > end.r / 8.0) --mid;
    if (mid == s.size() - 1 || s[mid].B <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log(end.B / s[mid].B) / std::log(end.r / s[mid].r);
}

double default_r_start(double c) {
    // keep the neglected r^6 series term below 1e-9 relative
    const double ratio = std::abs(1.0 + 2.0 * c) / 8.0;  // |a4/a2|
    if (ratio < 1e-30) return 1e-4;
    return std::clamp(std::sqrt(1e-9 / ratio), 1e-8, 1e-4);
}

}  // namespace

SeriesState series_start(double c, double r_start) {
    if (!(r_start > 0.0 && r_start <= 1e-3))
        throw std::invalid_argument("series_start: r_start must lie in (0, 1e-3]");
    const double a2 = -(1.0 + c) / 4.0;
    const double a4 = (1.0 + c) * (1.0 + 2.0 * c) / 32.0;
    if (a2 != 0.0 && std::abs(a4 / a2) * r_start * r_start > 1e-8)
        throw std::invalid_argument(
            "series_start: r_start too large for the truncated series at this c");
    const double r2 = r_start * r_start;
    const double u = a2 * r2 + a4 * r2 * r2;
    const double up = 2.0 * a2 * r_start + 4.0 * a4 * r2 * r_start;
    return {u, up, r_start * up, r_start * std::exp(2.0 * u)};
}

SolitonProfile integrate_profile(double c, const IntegrateOptions& opts) {
    if (!(opts.tol >= 1e-13 && opts.tol <= 1e-6))
        throw std::invalid_argument("integrate_profile: tol must lie in [1e-13, 1e-6]");
    SolitonProfile p;
    p.c = c;
    if (c == -1.0) {
        // exact branch: u = 0, A = 0, B = r
        const double r0 = (opts.r_start > 0) ? opts.r_start : 1e-4;
        const int n = 400;
        for (int i = 0; i <= n; ++i) {
            const double r = r0 * std::pow(opts.r_max / r0, double(i) / n);
            p.samples.push_back({r, 0.0, 0.0, r});
        }
        p.A_limit = 0.0;
        p.tail_uncertainty = 0.0;
        p.limit_reliable = true;
        p.r_stop = opts.r_max;
        p.stop_reason = StopReason::r_max_hit;
        p.area = M_PI * (opts.r_max * opts.r_max - r0 * r0);
        return p;
    }
    if (c < -1.0)
        throw std::invalid_argument("integrate_profile: c must exceed -1 (or equal -1 exactly)");

    const double r_start = (opts.r_start > 0) ? opts.r_start : default_r_start(c);
    const SeriesState s0 = series_start(c, r_start);
    double x = std::log(r_start);
    const double x_max = std::log(opts.r_max);
    // area of the series-covered inner disk, exact to O(r_start^4)
    State y{s0.A, std::log(s0.B), s0.u, M_PI * r_start * r_start * std::exp(2.0 * s0.u)};
    p.samples.push_back({r_start, y[2], y[0], s0.B});

    const double tol = opts.tol;
    double h = 0.01;
    State k1 = rhs(x, y, c);
    bool have_k1 = true;
    p.stop_reason = StopReason::r_max_hit;
    while (true) {
        if (x >= x_max - 1e-14) {
            p.stop_reason = StopReason::r_max_hit;
            break;
        }
        h = std::min({h, kMaxRelStep, x_max - x});
        if (h < 1e-14) {
            p.stop_reason = StopReason::step_underflow;
            break;
        }
        if (!have_k1) {
            k1 = rhs(x, y, c);
            have_k1 = true;
        }
        State yt;
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * a21 * k1[i];
        State k2 = rhs(x + c2 * h, yt, c);
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        State k3 = rhs(x + c3 * h, yt, c);
        for (int i = 0; i < 4; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        State k4 = rhs(x + c4 * h, yt, c);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        State k5 = rhs(x + c5 * h, yt, c);
        for (int i = 0; i < 4; ++i)
            yt[i] = y[i] +
                    h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        State k6 = rhs(x + h, yt, c);
        State ynew;
        for (int i = 0; i < 4; ++i)
            ynew[i] = y[i] +
                      h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        State k7 = rhs(x + h, ynew, c);
        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(e) / sc);
        }
        if (err <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;  // FSAL
            const double r = std::exp(x), B = std::exp(y[1]);
            p.samples.push_back({r, y[2], y[0], B});
            if (r * B < opts.eps_B &&
                r * B * std::abs(c * y[0] + c + 1.0) < 1e-12) {
                p.stop_reason = StopReason::b_below_eps;
                break;
            }
        } else {
            have_k1 = true;  // k1 still valid at unchanged x
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
    }

    p.r_stop = p.samples.back().r;
    p.area = y[3];
    if (p.stop_reason == StopReason::step_underflow) {
        p.A_limit = y[0];
        p.tail_uncertainty = std::numeric_limits<double>::infinity();
        p.limit_reliable = false;
    } else {
        auto [ac, unc] = limit_coefficient(p);
        p.A_limit = ac;
        p.tail_uncertainty = unc;
        p.limit_reliable = std::isfinite(unc);
        // close the area integral with the same measured power-law tail
        const double pexp = measured_decay(p);
        if (pexp < -1.05) p.area += 2.0 * M_PI * p.samples.back().B * p.r_stop / (-pexp - 1.0);
    }
    return p;
}

std::pair<double, double> limit_coefficient(const SolitonProfile& profile) {
    if (profile.stop_reason == StopReason::step_underflow)
        throw std::invalid_argument("limit_coefficient: profile ended in step underflow");
    const ProfileSample& end = profile.samples.back();
    if (end.B <= 0.0) return {end.A, 0.0};
    const double pexp = measured_decay(profile);
    if (std::isinf(pexp)) return {end.A, 0.0};
    const double kappa = std::abs(profile.c * end.A + profile.c + 1.0);
    if (pexp > -1.05) {
        // tail not integrable at the certified rate
        return {end.A, std::numeric_limits<double>::infinity()};
    }
    const double tail_B = end.B * end.r / (-pexp - 1.0);
    const double corr = kappa * tail_B;
    return {end.A - corr, corr};
}

std::pair<double, SolitonProfile> shoot_for_beta(double beta, double tol_beta,
                                                 const IntegrateOptions& opts) {
    if (!(beta > -1.0)) throw std::invalid_argument("shoot_for_beta: beta must exceed -1");
    if (!(tol_beta > 0.0)) throw std::invalid_argument("shoot_for_beta: tol_beta must be positive");
    const double target = -(beta + 2.0);

    auto eval = [&](double c) {
        SolitonProfile p = integrate_profile(c, opts);
        return std::pair<double, SolitonProfile>{p.A_limit - target, std::move(p)};
    };

    double lo = -0.5, hi = 1.0;
    auto [h_lo, p_lo] = eval(lo);
    auto [h_hi, p_hi] = eval(hi);
    if (std::abs(h_lo) <= tol_beta) return {lo, std::move(p_lo)};
    if (std::abs(h_hi) <= tol_beta) return {hi, std::move(p_hi)};
    // A_c increases toward -1 as c -> infinity and drops to -infinity as
    // c -> -1+; expand until the target is bracketed.
    while (h_lo > 0.0) {
        lo = -1.0 + (lo + 1.0) / 2.0;
        if (lo + 1.0 < 1e-6)
            throw std::runtime_error("shoot_for_beta: bracket hit c = -1 (numerical anomaly)");
        std::tie(h_lo, p_lo) = eval(lo);
        if (std::abs(h_lo) <= tol_beta) return {lo, std::move(p_lo)};
    }
    while (h_hi < 0.0) {
        hi *= 2.0;
        if (hi > 1e6)
            throw std::runtime_error("shoot_for_beta: bracket exceeded c = 1e6 (numerical anomaly)");
        std::tie(h_hi, p_hi) = eval(hi);
        if (std::abs(h_hi) <= tol_beta) return {hi, std::move(p_hi)};
    }

    for (int iter = 0; iter < 200; ++iter) {
        // secant proposal, clipped to the middle half of the bracket
        double cm = 0.5 * (lo + hi);
        if (h_hi != h_lo) {
            const double sec = lo - h_lo * (hi - lo) / (h_hi - h_lo);
            const double q1 = lo + 0.25 * (hi - lo), q3 = lo + 0.75 * (hi - lo);
            if (sec > q1 && sec < q3) cm = sec;
        }
        auto [h_m, p_m] = eval(cm);
        if (std::abs(h_m) <= tol_beta) return {cm, std::move(p_m)};
        if (h_m < 0.0) {
            lo = cm;
            h_lo = h_m;
        } else {
            hi = cm;
            h_hi = h_m;
        }
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo)))
            throw std::runtime_error("shoot_for_beta: bracket collapsed before reaching tol_beta");
    }
    throw std::runtime_error("shoot_for_beta: iteration limit reached");
}

double soliton_residual(const SolitonProfile& profile, double c) {
    double sup = 0.0;
    for (const auto& s : profile.samples) {
        // u'' + u'/r = ((A'r - A) + A)/r^2 = A'/r, combined before dividing
        // so e^{-2u} cannot amplify the cancellation roundoff
        const double Aprime = -s.B * (c * s.A + c + 1.0);
        const double R = -2.0 * std::exp(-2.0 * s.u) * Aprime / s.r;
        sup = std::max(sup, std::abs(R - 2.0 - (2.0 * c + 2.0 * c * s.A)));
    }
    return sup;
}

double curvature_min(const SolitonProfile& profile) {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& s : profile.samples) {
        const double Aprime = -s.B * (profile.c * s.A + profile.c + 1.0);
        mn = std::min(mn, -std::exp(-2.0 * s.u) * Aprime / s.r);
    }
    return mn;
}

FootballMetric construct_football(double beta1, double beta2, double tol_beta,
                                  const IntegrateOptions& opts) {
    if (!(beta1 > -1.0) || !(beta2 > -1.0))
        throw std::invalid_argument("construct_football: both orders must exceed -1");
    const double lambda = (beta1 + 1.0) / (beta2 + 1.0) - 1.0;
    auto [c, base] = shoot_for_beta(lambda, tol_beta, opts);
    return {beta1, beta2, lambda, c, std::move(base), beta2 + 1.0};
}

namespace {

// cubic Hermite interpolation of the profile state at radius r, using ODE
// right sides as endpoint derivatives
struct Interp {
    double u, A, B;
};

Interp interp_profile(const SolitonProfile& p, double r) {
    const auto& s = p.samples;
    auto it = std::lower_bound(s.begin(), s.end(), r,
                               [](const ProfileSample& a, double v) { return a.r < v; });
    if (it == s.begin()) it = s.begin() + 1;
    if (it == s.end()) --it;
    const ProfileSample &q0 = *(it - 1), &q1 = *it;
    const double h = q1.r - q0.r;
    const double t = (r - q0.r) / h;
    // quintic Hermite basis on [0,1]
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h2 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h3 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h4 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);
    auto hermite = [&](double y0, double y1, double d0, double d1, double s0, double s1) {
        return y0 * h0 + y1 * h1 + h * (d0 * h2 + d1 * h3) + h * h * (s0 * h4 + s1 * h5);
    };
    struct D {
        double dA, dB, du, sA, sB, su;
    };
    auto deriv = [&](const ProfileSample& q) {
        const double kap = p.c * q.A + p.c + 1.0;
        D d;
        d.dA = -q.B * kap;
        d.dB = q.B * (2.0 * q.A + 1.0) / q.r;
        d.du = q.A / q.r;
        d.sA = -d.dB * kap - q.B * p.c * d.dA;
        d.sB = d.dB * (2.0 * q.A + 1.0) / q.r + 2.0 * q.B * d.dA / q.r -
               q.B * (2.0 * q.A + 1.0) / (q.r * q.r);
        d.su = d.dA / q.r - q.A / (q.r * q.r);
        return d;
    };
    const D d0 = deriv(q0), d1 = deriv(q1);
    return {hermite(q0.u, q1.u, d0.du, d1.du, d0.su, d1.su),
            hermite(q0.A, q1.A, d0.dA, d1.dA, d0.sA, d1.sA),
            hermite(q0.B, q1.B, d0.dB, d1.dB, d0.sB, d1.sB)};
}

}  // namespace

ExportedMetric export_as_cone_metric(const SolitonProfile& profile, const GridSpec& grid,
                                     double angular_factor) {
    if (profile.samples.size() < 2)
        throw std::invalid_argument("export_as_cone_metric: profile has too few samples");
    const double lambda = -profile.A_limit - 2.0;
    const double m = lambda + 1.0;
    if (!(m > 0.0))
        throw std::invalid_argument("export_as_cone_metric: profile limit gives no cone end");
    const double beta_chart = (lambda + 1.0) * angular_factor - 1.0;
    const int k_max = int(std::llround(-grid.w_min));
    if (std::abs(grid.w_min + k_max) > 1e-12)
        throw std::invalid_argument("export_as_cone_metric: grid w_min must be a negative integer");

    const double r_lo = profile.samples.front().r, r_hi = profile.samples.back().r;
    ScalarField wt(grid), k0(grid);
    for (int i = 0; i < grid.n_w; ++i) {
        const double rho = rho_of_w(grid.w(i));
        const double r = std::pow((beta_chart + 1.0) * rho, -1.0 / m);
        if (r < r_lo * (1 - 1e-12) || r > r_hi * (1 + 1e-12))
            throw std::invalid_argument(
                "export_as_cone_metric: grid requires r outside the profile's range");
        const Interp q = interp_profile(profile, r);
        const double wtv = q.u + (m + 1.0) * std::log(r) + std::log((beta_chart + 1.0) / m);
        const double Kv = std::exp(-2.0 * q.u) * q.B * (profile.c * q.A + profile.c + 1.0) / r;
        for (int j = 0; j < grid.n_theta; ++j) {
            wt.at(i, j) = wtv;
            k0.at(i, j) = Kv;
        }
    }
    ConeMetric metric(ConeChart(beta_chart, k_max), std::move(wt), ScalarField(grid),
                      angular_factor * (-profile.A_limit));
    return {std::move(metric), std::move(k0)};
}

}  // namespace coneflow
