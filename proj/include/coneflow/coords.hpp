#ifndef CONEFLOW_COORDS_HPP
#define CONEFLOW_COORDS_HPP

#include <string>
#include <vector>

namespace coneflow {

// One cone point: label and order beta > -1. Cone angle is 2*pi*(beta+1).
struct DivisorEntry {
    std::string label;
    double beta;
};

// The divisor beta = sum beta_i p_i prescribing the singular conformal class.
// At most two entries (tear drop / football scope).
class Divisor {
public:
    explicit Divisor(std::vector<DivisorEntry> entries);

    const std::vector<DivisorEntry>& entries() const { return entries_; }
    double beta_sum() const;
    double cone_angle(std::size_t i) const;

private:
    std::vector<DivisorEntry> entries_;
};

// Coordinate stack around one cone point: r <-> rho <-> w, truncated at
// rho = 2^{-k_max}. sigma = -1/(beta+1) is the exponent mapping the cone
// end at r = infinity into a chart coordinate near 0.
struct ConeChart {
    double beta;
    int k_max;

    ConeChart(double beta_, int k_max_);

    double rho_cut() const;  // exactly 2^{-k_max}
    double sigma() const { return -1.0 / (beta + 1.0); }
};

// Uniform (w, theta) cylinder grid. w in [w_min, w_max], theta in [0, 2*pi)
// with n_theta samples and periodic wrap.
struct GridSpec {
    double w_min;
    double w_max;
    int n_w;
    int n_theta;

    GridSpec(double w_min_, double w_max_, int n_w_, int n_theta_);

    double h_w() const { return (w_max - w_min) / (n_w - 1); }
    double h_theta() const;
    double w(int i) const { return w_min + i * h_w(); }
    double theta(int j) const { return j * h_theta(); }
    std::size_t size() const { return std::size_t(n_w) * n_theta; }

    bool operator==(const GridSpec&) const = default;
};

// rho = r^{beta+1} / (beta+1)
double rho_of_r(double r, double beta);
double r_of_rho(double rho, double beta);

// w = log2(rho); exact on dyadic rho.
double w_of_rho(double rho);
double rho_of_w(double w);

// Membership of rho in the open dyadic annulus Omega_k = (2^{-k-1}, 2^{-k+1}),
// together with the rescaled coordinate s = 2^k * rho in (1/2, 2).
struct AnnulusHit {
    int k;
    double s;
};

// All annuli (one or two consecutive k >= 1) containing rho in (0, 1].
// A point on a dyadic boundary belongs only to the annulus where s is
// interior; rho = 1 falls back to k = 0, s = 1.
std::vector<AnnulusHit> annulus_of(double rho);

}  // namespace coneflow

#endif
