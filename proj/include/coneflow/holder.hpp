#ifndef CONEFLOW_HOLDER_HPP
#define CONEFLOW_HOLDER_HPP

#include "coneflow/spacetime.hpp"
#include "coneflow/surface.hpp"

namespace coneflow {

// Regularity order for the weighted Hoelder estimator. l in {0,1,2},
// alpha strictly inside (0,1).
struct HolderSpec {
    int l;
    double alpha;

    HolderSpec(int l_, double alpha_);
};

struct NormPart {
    int k;  // annulus index; k = 0 labels the smooth central band
    double value;
};

// Per-annulus sampled norms. total is the max over parts; slack is the
// estimator's discretization allowance (sup locations move under refinement
// by at most one cell).
struct NormReport {
    std::vector<NormPart> parts;
    double total;
    int saturating_k;
    double slack;
};

struct HolderOptions {
    int pair_stride = 1;  // subsample Hoelder-quotient pairs; 1 = all pairs
};

// Dyadic-rescaled C^{l,alpha} estimate: for each annulus Omega_k the field
// is read in coordinates s = 2^k rho in (1/2,2); derivatives by centered
// differences, Hoelder quotients sampled over all grid pairs in the
// annulus. The k = 0 part is the central band w in [-2, w_max] measured in
// (w,theta) directly.
NormReport weighted_holder_norm(const ScalarField& field, const ConeChart& chart,
                                const HolderSpec& spec, const HolderOptions& opts = {});

// C^{l,alpha} estimate on the tube (-k-1, -k+1) x S^1 in (w,theta)
// variables directly.
double cylinder_norm(const ScalarField& field, int k, const HolderSpec& spec,
                     const HolderOptions& opts = {});

// Parabolic variant (l = 0 only): per annulus, time is rescaled to
// t~ = 2^{2k} t and quotients use the parabolic distance
// max(|x-y|, sqrt|t-s|).
NormReport parabolic_holder_norm(const SpaceTimeField& field, const ConeChart& chart,
                                 const HolderSpec& spec, const HolderOptions& opts = {});

}  // namespace coneflow

#endif
