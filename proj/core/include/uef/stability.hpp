#pragma once

#include <array>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "uef/dataset.hpp"
#include "uef/explain.hpp"
#include "uef/perturb.hpp"

namespace uef {

enum class InversionKind { reciprocal, exponential };

const char* inversion_name(InversionKind kind);
InversionKind inversion_from_name(const std::string& name);

// stability = 1/(1+instability) (default) or exp(-instability); maps mean
// attribution drift into (0,1], monotone decreasing.
double invert_instability(double instability, InversionKind kind);

struct InstanceStability {
    std::size_t row_index = 0;
    double instability = 0.0;
    double stability = 0.0;
};

// Mean Euclidean distance between the ensemble attribution of x and the
// attributions of its k perturbed variants.
double attribution_drift(std::span<const double> base, const Matrix& variant_attrs);

// Full per-instance pipeline: ensemble attribution of x, k variants, one
// attribution each under the same explanation seed as the base (paired
// draws, so the drift reflects the perturbation, not sampler noise), mean
// distance, inversion.
InstanceStability instance_stability(const Predictor& f, std::span<const double> x,
                                     const ExplainConfig& explain_cfg,
                                     const PerturbConfig& perturb_cfg, InversionKind inversion,
                                     rng::Seed instance_seed, std::size_t row_index);

struct InstanceRecord {
    SubgroupKey group;
    int label = 0;
    double stability = 0.0;
    std::size_t row_index = 0;
};

struct StabilityCell {
    std::size_t count = 0;
    double raw_mean = 0.0;
    double alpha = 0.0;    // count / (count + lambda)
    double shrunk = 0.0;   // alpha*raw + (1-alpha)*pooled label mean
};

struct StabilityTable {
    double lambda = 0.0;
    std::map<std::pair<SubgroupKey, int>, StabilityCell> cells;
    std::array<double, 2> label_mean{0.0, 0.0};      // pooled per label
    std::array<std::size_t, 2> label_count{0, 0};
    std::array<double, 2> label_weight{0.0, 0.0};    // label prevalence
    std::map<SubgroupKey, double> group_scores;      // prevalence-weighted
};

// Shrinks small cells toward the pooled per-label mean, then collapses labels
// by prevalence. A (group,label) cell with no instances contributes the
// pooled mean. Iteration and summation order are fixed, so the result does
// not depend on input ordering.
StabilityTable aggregate_stability(std::vector<InstanceRecord> records, double lambda);

// Deterministic stratified sample over (subgroup,label) cells of a split:
// proportional allocation with largest remainders, at least one per non-empty
// cell when the budget allows, seeded without-replacement draws inside cells.
// Returns dataset row indices in ascending order.
std::vector<std::size_t> sample_for_stability(const TabularDataset& ds, Split split,
                                              std::size_t n_max, rng::Seed seed);

struct StabilityConfig {
    double lambda = 10.0;
    std::size_t sample_max = 200;
    InversionKind inversion = InversionKind::reciprocal;
    void validate() const;
};

}  // namespace uef
