#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "uef/dataset.hpp"
#include "uef/mesd.hpp"
#include "uef/model.hpp"
#include "uef/stability.hpp"

namespace uef {

// Mann-Whitney AUC with tie handling, computed in integer half-win units so
// the result is exact up to the final division. Errors if only one class is
// present.
double auc_score(std::span<const double> scores, std::span<const int> labels);

// Harmonic mean of precision and recall; 0 when undefined.
double f1_score(std::span<const int> predicted, std::span<const int> truth);

struct DpResult {
    double gap = 0.0;        // max pairwise |positive-rate difference|
    bool degenerate = false; // fewer than two subgroups present
};

DpResult dp_gap(std::span<const int> predicted, const std::vector<SubgroupKey>& groups);

struct EodResult {
    double gap = 0.0;  // max over y in {0,1} of max pairwise rate difference
    bool degenerate = false;
    std::vector<std::string> skipped;  // "<group>@y" cells without that label
};

// `group_names` is parallel to `groups` (one entry per row), like the labels.
EodResult eod_gap(std::span<const int> predicted, std::span<const int> truth,
                  const std::vector<SubgroupKey>& groups,
                  const std::vector<std::string>& group_names);

// Minimization triple handed to the optimizer:
// performance = -AUC, outcome = demographic-parity gap,
// process = tail-weighted explanation-stability disparity.
struct ObjectiveVector {
    double perf = 0.0;
    double out = 0.0;
    double proc = 0.0;

    bool operator==(const ObjectiveVector&) const = default;
    [[nodiscard]] std::array<double, 3> as_array() const { return {perf, out, proc}; }
};

// a dominates b: no worse everywhere, strictly better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Objectives reported for a model whose training diverged; strictly dominated
// by any model that trains at all.
inline constexpr ObjectiveVector kInfeasibleObjectives{0.0, 1.0, 1.0};

struct GroupRates {
    std::string name;
    std::size_t count = 0;
    std::size_t positives = 0;       // true labels
    std::size_t predicted_pos = 0;
    double positive_rate = 0.0;      // predicted
    double tpr = 0.0;
    double fpr = 0.0;
    bool tpr_defined = false;
    bool fpr_defined = false;
};

struct FairnessReport {
    double auc = 0.0;
    double f1 = 0.0;
    DpResult dp;
    EodResult eod;
    MesdResult mesd;
    std::map<SubgroupKey, GroupRates> per_group;
    std::map<SubgroupKey, std::string> group_names;
    std::size_t stability_sample_size = 0;
    bool infeasible = false;
};

struct PipelineConfig {
    ExplainConfig explain;
    StabilityConfig stability;
    MesdConfig mesd;
    int perturb_k = 25;
    double perturb_sigma = 0.1;
    double perturb_mask_prob = 0.1;
    bool perturb_noisy_mask = false;
    int workers = 1;

    void validate() const;
};

struct EvaluationResult {
    ObjectiveVector objectives;
    FairnessReport report;
    StabilityTable stability;  // empty when infeasible
    Classifier model;          // untrained when infeasible
    bool infeasible = false;
};

// Train on the train split, score AUC/fairness on `eval_split`, run the
// stability pipeline on a stratified sample of that split, aggregate, and
// fold everything into the objective triple. A training divergence yields the
// infeasible sentinel instead of propagating.
EvaluationResult evaluate_config(const TabularDataset& ds, ModelKind kind,
                                 const HyperParams& hp, const PipelineConfig& cfg,
                                 Split eval_split, rng::Seed seed);

// Same scoring for an already-trained model (the model field of the result is
// left untouched).
EvaluationResult evaluate_model(const TabularDataset& ds, const Classifier& model,
                                const PipelineConfig& cfg, Split eval_split, rng::Seed seed);

// The stability part alone, for a caller that already has a model.
StabilityTable stability_table_for(const TabularDataset& ds, const Predictor& model,
                                   const PipelineConfig& cfg, Split eval_split, rng::Seed seed,
                                   std::vector<InstanceRecord>* records_out = nullptr);

}  // namespace uef
