#include "coneflow/coords.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace coneflow {

Divisor::Divisor(std::vector<DivisorEntry> entries) : entries_(std::move(entries)) {
    if (entries_.size() > 2)
        throw std::invalid_argument("Divisor: at most 2 cone points supported");
    std::set<std::string> labels;
    for (const auto& e : entries_) {
        if (!(e.beta > -1.0))
            throw std::invalid_argument("Divisor: beta must exceed -1 (label " + e.label + ")");
        if (!labels.insert(e.label).second)
            throw std::invalid_argument("Divisor: duplicate point label " + e.label);
    }
}

double Divisor::beta_sum() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.beta;
    return s;
}

double Divisor::cone_angle(std::size_t i) const {
    return 2.0 * M_PI * (entries_.at(i).beta + 1.0);
}

ConeChart::ConeChart(double beta_, int k_max_) : beta(beta_), k_max(k_max_) {
    if (!(beta > -1.0)) throw std::invalid_argument("ConeChart: beta must exceed -1");
    if (k_max < 1) throw std::invalid_argument("ConeChart: k_max must be >= 1");
}

double ConeChart::rho_cut() const { return std::ldexp(1.0, -k_max); }

GridSpec::GridSpec(double w_min_, double w_max_, int n_w_, int n_theta_)
    : w_min(w_min_), w_max(w_max_), n_w(n_w_), n_theta(n_theta_) {
    if (n_w < 8 || n_theta < 8)
        throw std::invalid_argument("GridSpec: n_w and n_theta must be >= 8");
    if (!(w_max > w_min)) throw std::invalid_argument("GridSpec: w_max must exceed w_min");
}

double GridSpec::h_theta() const { return 2.0 * M_PI / n_theta; }

double rho_of_r(double r, double beta) {
    if (!(beta > -1.0)) throw std::domain_error("rho_of_r: beta must exceed -1");
    if (!(r >= 0.0)) throw std::domain_error("rho_of_r: r must be nonnegative");
    return std::pow(r, beta + 1.0) / (beta + 1.0);
}

double r_of_rho(double rho, double beta) {
    if (!(beta > -1.0)) throw std::domain_error("r_of_rho: beta must exceed -1");
    if (!(rho >= 0.0)) throw std::domain_error("r_of_rho: rho must be nonnegative");
    return std::pow((beta + 1.0) * rho, 1.0 / (beta + 1.0));
}

double w_of_rho(double rho) {
    if (!(rho > 0.0)) throw std::domain_error("w_of_rho: rho must be positive");
    return std::log2(rho);
}

double rho_of_w(double w) { return std::exp2(w); }

std::vector<AnnulusHit> annulus_of(double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("annulus_of: rho must lie in (0, 1]");
    std::vector<AnnulusHit> hits;
    const int k0 = int(std::floor(-std::log2(rho)));
    for (int k = std::max(1, k0 - 1); k <= k0 + 2; ++k) {
        const double s = std::ldexp(rho, k);
        if (s > 0.5 && s < 2.0) hits.push_back({k, s});
    }
    if (hits.empty()) {
        // only rho = 1 reaches here: the k = 0 annulus has s = 1 interior
        const double s = rho;
        if (s > 0.5 && s < 2.0) hits.push_back({0, s});
    }
    return hits;
}

}  // namespace coneflow
