#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "uef/common.hpp"
#include "uef/model.hpp"
#include "uef/rng.hpp"

namespace uef {

struct Attribution {
    std::vector<double> values;   // one per feature, signed
    std::string explainer_id;
    bool normalized = false;

    bool operator==(const Attribution&) const = default;
};

struct ShapleyConfig {
    int permutations = 16;  // >= 1; drawn as antithetic (forward, reversed) pairs
    void validate() const;
};

struct SurrogateConfig {
    int samples = 100;          // >= d+2 effective draws
    double kernel_width = 0.0;  // <= 0 resolves to 0.75*sqrt(d)
    double ridge = 1e-3;        // > 0
    void validate() const;
};

inline constexpr char kShapleyId[] = "shapley";
inline constexpr char kSurrogateId[] = "surrogate";
inline constexpr char kEnsembleId[] = "ensemble";

// Monte-Carlo permutation Shapley values against a fixed baseline vector.
// Permutations are sampled in (pi, reverse(pi)) pairs, so for d = 2 a budget
// of 2 enumerates both orderings and the estimate is exact.
Attribution explain_shapley(const Predictor& f, std::span<const double> x,
                            std::span<const double> baseline, const ShapleyConfig& cfg,
                            rng::Seed seed);

// Local linear surrogate: Gaussian perturbations around x, proximity kernel
// exp(-dist^2 / width^2), weighted ridge regression with intercept; the
// coefficient vector is the attribution.
Attribution explain_surrogate(const Predictor& f, std::span<const double> x,
                              const SurrogateConfig& cfg, rng::Seed seed);

double resolve_kernel_width(const SurrogateConfig& cfg, std::size_t d);

// Signed L1 normalization: divide by sum of |values|; all-zero stays zero.
Attribution normalize_l1(Attribution a);

struct EnsembleWeights {
    std::map<std::string, double> weights;  // explainer_id -> weight
    void validate() const;                  // nonnegative, sums to 1 within 1e-9
    static EnsembleWeights uniform(const std::vector<std::string>& ids);
};

// Convex combination of normalized attributions. Inputs must be normalized
// and cover exactly the weight keys.
Attribution ensemble(const std::vector<Attribution>& parts, const EnsembleWeights& w);

struct ExplainConfig {
    bool use_shapley = true;
    bool use_surrogate = true;
    ShapleyConfig shapley;
    SurrogateConfig surrogate;
    std::map<std::string, double> weights;  // empty = uniform over enabled

    void validate() const;
    [[nodiscard]] std::vector<std::string> enabled_ids() const;
    [[nodiscard]] EnsembleWeights resolved_weights() const;
};

// Runs each enabled explainer with seed derived from (base_seed, explainer id),
// normalizes, and combines. This is the attribution the stability pipeline sees.
Attribution ensemble_explain(const Predictor& f, std::span<const double> x,
                             std::span<const double> baseline, const ExplainConfig& cfg,
                             rng::Seed base_seed);

namespace explain_detail {

// Weighted ridge fit with unpenalized intercept; returns
// [intercept, coef_0, ..., coef_{d-1}].
std::vector<double> weighted_ridge(const Matrix& deltas, const std::vector<double>& weights,
                                   const std::vector<double>& y, double ridge);

}  // namespace explain_detail

}  // namespace uef
