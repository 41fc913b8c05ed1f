#pragma once

#include <map>
#include <vector>

#include "uef/common.hpp"
#include "uef/dataset.hpp"

namespace uef {

struct PairwiseDisparity {
    SubgroupKey group_i;
    SubgroupKey group_j;
    double gap = 0.0;   // |S(g_i) - S(g_j)|
    double risk = 0.0;  // 1 - min(S(g_i), S(g_j))
};

// All unordered pairs in canonical (sorted key) order. Errors with fewer than
// two groups or non-finite scores.
std::vector<PairwiseDisparity> pairwise_disparities(const std::map<SubgroupKey, double>& scores);

struct MesdConfig {
    double alpha = 0.2;     // tail fraction, in (0,1)
    double epsilon = 1e-9;  // denominator guard, > 0
    void validate() const;
};

struct MesdResult {
    double alpha = 0.0;
    double tau = 0.0;                      // (1-alpha) risk quantile
    std::vector<PairwiseDisparity> pairs;  // canonical order
    std::vector<double> weights;           // parallel to pairs
    double mesd_cvar = 0.0;
    double mesd_max = 0.0;
    double mesd_var = 0.0;
    bool fallback = false;    // no pair exceeded tau strictly
    bool degenerate = false;  // fewer than two groups: all values 0
};

// Linear-interpolation quantile of the sorted sample (the convention used for
// the risk threshold tau). q in [0,1].
double interpolated_quantile(std::vector<double> values, double q);

// Risk-weighted tail aggregate of pairwise gaps. Weights are normalized
// excess risk over tau; when every excess is zero the mass concentrates on
// the largest-gap pair(s) within the tail {risk >= tau}, so the aggregate
// still reports the worst tail gap instead of diluting it.
MesdResult mesd_cvar(const std::vector<PairwiseDisparity>& pairs, const MesdConfig& cfg);

// Convenience wrapper from group scores; fewer than two groups yields the
// degenerate all-zero result instead of an error.
MesdResult mesd_from_scores(const std::map<SubgroupKey, double>& scores, const MesdConfig& cfg);

// Plain variants over all pairs: max gap and population variance of gaps.
double mesd_max_of(const std::vector<PairwiseDisparity>& pairs);
double mesd_var_of(const std::vector<PairwiseDisparity>& pairs);

}  // namespace uef
