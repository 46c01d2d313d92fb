#include "coneflow/holder.hpp"

#include <cmath>
#include <stdexcept>

namespace coneflow {

namespace {

constexpr double kLn2 = 0.6931471805599453094;

double wrap_theta(double d) {
    d = std::abs(d);
    while (d > M_PI) d = std::abs(d - 2.0 * M_PI);
    return d;
}

double d2w_at(const ScalarField& f, int i, int j) {
    const GridSpec& g = f.grid();
    const double hw2 = g.h_w() * g.h_w();
    if (i == 0)
        return (2.0 * f.at(0, j) - 5.0 * f.at(1, j) + 4.0 * f.at(2, j) - f.at(3, j)) / hw2;
    if (i == g.n_w - 1)
        return (2.0 * f.at(i, j) - 5.0 * f.at(i - 1, j) + 4.0 * f.at(i - 2, j) -
                f.at(i - 3, j)) /
               hw2;
    return (f.at(i - 1, j) - 2.0 * f.at(i, j) + f.at(i + 1, j)) / hw2;
}

double d2theta_at(const ScalarField& f, int i, int j) {
    const double ht2 = f.grid().h_theta() * f.grid().h_theta();
    return (f.at(i, j - 1) - 2.0 * f.at(i, j) + f.at(i, j + 1)) / ht2;
}

double dwdtheta_at(const ScalarField& f, int i, int j) {
    const GridSpec& g = f.grid();
    const double h = 4.0 * g.h_w() * g.h_theta();
    if (i == 0 || i == g.n_w - 1) {
        // one-sided in w on the centered theta difference
        const int i1 = (i == 0) ? 1 : i - 1;
        const int i2 = (i == 0) ? 2 : i - 2;
        const double sgn = (i == 0) ? 1.0 : -1.0;
        auto dth = [&](int ii) { return (f.at(ii, j + 1) - f.at(ii, j - 1)) / (2.0 * g.h_theta()); };
        return sgn * (-3.0 * dth(i) + 4.0 * dth(i1) - dth(i2)) / (2.0 * g.h_w());
    }
    return (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) - f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) /
           h;
}

// One sample point of the estimator: position in estimator coordinates,
// function value and derivatives up to the requested order.
struct Pt {
    double x1, x2;
    double v;
    double g1 = 0, g2 = 0;
    double h11 = 0, h12 = 0, h22 = 0;
};

// rows with w strictly inside (-k-1, -k+1)
std::vector<int> tube_rows(const GridSpec& g, int k) {
    std::vector<int> rows;
    for (int i = 0; i < g.n_w; ++i) {
        const double w = g.w(i);
        if (w > -k - 1.0 + 1e-12 && w < -k + 1.0 - 1e-12) rows.push_back(i);
    }
    return rows;
}

// Collect points for an annulus (rescale = true: x1 = s = 2^{w+k}) or a
// plain tube/band (x1 = w).
std::vector<Pt> collect(const ScalarField& f, const std::vector<int>& rows, int l, bool rescale,
                        int k) {
    const GridSpec& g = f.grid();
    std::vector<Pt> pts;
    pts.reserve(rows.size() * g.n_theta);
    for (int i : rows) {
        const double w = g.w(i);
        const double s = std::exp2(w + k);
        for (int j = 0; j < g.n_theta; ++j) {
            Pt p;
            p.x1 = rescale ? s : w;
            p.x2 = g.theta(j);
            p.v = f.at(i, j);
            if (l >= 1) {
                const double fw = f.dw(i, j);
                p.g2 = f.dtheta(i, j);
                p.g1 = rescale ? fw / (s * kLn2) : fw;
                if (l >= 2) {
                    const double fww = d2w_at(f, i, j);
                    const double fwt = dwdtheta_at(f, i, j);
                    p.h22 = d2theta_at(f, i, j);
                    if (rescale) {
                        p.h11 = fww / (s * s * kLn2 * kLn2) - fw / (s * s * kLn2);
                        p.h12 = fwt / (s * kLn2);
                    } else {
                        p.h11 = fww;
                        p.h12 = fwt;
                    }
                }
            }
            pts.push_back(p);
        }
    }
    return pts;
}

double estimate(const std::vector<Pt>& pts, const HolderSpec& spec, int stride) {
    double sup_v = 0, sup_g = 0, sup_h = 0, quot = 0;
    for (const Pt& p : pts) {
        sup_v = std::max(sup_v, std::abs(p.v));
        if (spec.l >= 1) sup_g = std::max({sup_g, std::abs(p.g1), std::abs(p.g2)});
        if (spec.l >= 2)
            sup_h = std::max({sup_h, std::abs(p.h11), std::abs(p.h12), std::abs(p.h22)});
    }
    for (std::size_t a = 0; a < pts.size(); a += stride) {
        for (std::size_t b = a + 1; b < pts.size(); b += stride) {
            const Pt &p = pts[a], &q = pts[b];
            const double d = std::hypot(p.x1 - q.x1, wrap_theta(p.x2 - q.x2));
            if (d < 1e-14) continue;
            double dv;
            if (spec.l == 0)
                dv = std::abs(p.v - q.v);
            else if (spec.l == 1)
                dv = std::hypot(p.g1 - q.g1, p.g2 - q.g2);
            else
                dv = std::max({std::abs(p.h11 - q.h11), std::abs(p.h12 - q.h12),
                               std::abs(p.h22 - q.h22)});
            quot = std::max(quot, dv / std::pow(d, spec.alpha));
        }
    }
    return sup_v + sup_g + sup_h + quot;
}

double grad_scale(const ScalarField& f) {
    const GridSpec& g = f.grid();
    double m = 0;
    for (int i = 0; i < g.n_w; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            m = std::max(m, std::hypot(f.dw(i, j), f.dtheta(i, j)));
    return m;
}

}  // namespace

HolderSpec::HolderSpec(int l_, double alpha_) : l(l_), alpha(alpha_) {
    if (l < 0 || l > 2) throw std::invalid_argument("HolderSpec: l must be in {0,1,2}");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("HolderSpec: alpha must lie strictly in (0,1)");
}

NormReport weighted_holder_norm(const ScalarField& field, const ConeChart& chart,
                                const HolderSpec& spec, const HolderOptions& opts) {
    const GridSpec& g = field.grid();
    NormReport rep;
    const int k_start = std::max(1, int(std::ceil(1.0 - g.w_max - 1e-12)));
    for (int k = k_start; k <= chart.k_max - 1; ++k) {
        auto rows = tube_rows(g, k);
        if (int(rows.size()) < 8)
            throw std::invalid_argument("weighted_holder_norm: annulus k=" + std::to_string(k) +
                                        " under-resolved (" + std::to_string(rows.size()) +
                                        " radial samples, need 8)");
        auto pts = collect(field, rows, spec.l, true, k);
        rep.parts.push_back({k, estimate(pts, spec, opts.pair_stride)});
    }
    // smooth central band w in [-2, w_max], measured in (w,theta) directly
    std::vector<int> band;
    for (int i = 0; i < g.n_w; ++i)
        if (g.w(i) >= -2.0 - 1e-12) band.push_back(i);
    if (int(band.size()) >= 4) {
        auto pts = collect(field, band, spec.l, false, 0);
        rep.parts.push_back({0, estimate(pts, spec, opts.pair_stride)});
    }
    if (rep.parts.empty())
        throw std::invalid_argument("weighted_holder_norm: grid resolves no annulus");
    rep.total = 0;
    rep.saturating_k = rep.parts.front().k;
    for (const auto& p : rep.parts)
        if (p.value > rep.total) {
            rep.total = p.value;
            rep.saturating_k = p.k;
        }
    rep.slack = grad_scale(field) * (g.h_w() + g.h_theta());
    return rep;
}

double cylinder_norm(const ScalarField& field, int k, const HolderSpec& spec,
                     const HolderOptions& opts) {
    auto rows = tube_rows(field.grid(), k);
    if (int(rows.size()) < 8)
        throw std::invalid_argument("cylinder_norm: tube k=" + std::to_string(k) +
                                    " under-resolved");
    auto pts = collect(field, rows, spec.l, false, k);
    return estimate(pts, spec, opts.pair_stride);
}

NormReport parabolic_holder_norm(const SpaceTimeField& field, const ConeChart& chart,
                                 const HolderSpec& spec, const HolderOptions& opts) {
    if (spec.l != 0)
        throw std::invalid_argument("parabolic_holder_norm: only l = 0 is supported");
    const GridSpec& g = field.grid();
    NormReport rep;

    struct P3 {
        double x1, x2, t;
        double v;
    };
    auto para_estimate = [&](const std::vector<P3>& pts) {
        double sup_v = 0, quot = 0;
        for (const auto& p : pts) sup_v = std::max(sup_v, std::abs(p.v));
        for (std::size_t a = 0; a < pts.size(); a += opts.pair_stride)
            for (std::size_t b = a + 1; b < pts.size(); b += opts.pair_stride) {
                const auto &p = pts[a], &q = pts[b];
                const double d = std::max(std::hypot(p.x1 - q.x1, wrap_theta(p.x2 - q.x2)),
                                          std::sqrt(std::abs(p.t - q.t)));
                if (d < 1e-14) continue;
                quot = std::max(quot, std::abs(p.v - q.v) / std::pow(d, spec.alpha));
            }
        return sup_v + quot;
    };

    auto gather = [&](const std::vector<int>& rows, bool rescale, int k) {
        std::vector<P3> pts;
        const double tscale = rescale ? std::exp2(2.0 * k) : 1.0;
        for (std::size_t n = 0; n < field.size(); ++n) {
            const ScalarField& fr = field.frame(n);
            const double tt = field.times()[n] * tscale;
            for (int i : rows)
                for (int j = 0; j < g.n_theta; ++j)
                    pts.push_back({rescale ? std::exp2(g.w(i) + k) : g.w(i), g.theta(j), tt,
                                   fr.at(i, j)});
        }
        return pts;
    };

    const int k_start = std::max(1, int(std::ceil(1.0 - g.w_max - 1e-12)));
    for (int k = k_start; k <= chart.k_max - 1; ++k) {
        auto rows = tube_rows(g, k);
        if (int(rows.size()) < 8)
            throw std::invalid_argument("parabolic_holder_norm: annulus k=" +
                                        std::to_string(k) + " under-resolved");
        rep.parts.push_back({k, para_estimate(gather(rows, true, k))});
    }
    std::vector<int> band;
    for (int i = 0; i < g.n_w; ++i)
        if (g.w(i) >= -2.0 - 1e-12) band.push_back(i);
    if (int(band.size()) >= 4) rep.parts.push_back({0, para_estimate(gather(band, false, 0))});
    if (rep.parts.empty())
        throw std::invalid_argument("parabolic_holder_norm: grid resolves no annulus");

    rep.total = 0;
    rep.saturating_k = rep.parts.front().k;
    for (const auto& p : rep.parts)
        if (p.value > rep.total) {
            rep.total = p.value;
            rep.saturating_k = p.k;
        }
    double gs = 0;
    for (const auto& fr : field.frames()) gs = std::max(gs, grad_scale(fr));
    rep.slack = gs * (g.h_w() + g.h_theta());
    return rep;
}

}  // namespace coneflow
