#include "uef/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uef/parallel.hpp"
#include "uef/perturb.hpp"

namespace uef {

double auc_score(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw Error(ErrorKind::shape, "score and label counts differ");
    if (scores.empty()) throw Error(ErrorKind::data, "empty evaluation set");
    unsigned long long n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw Error(ErrorKind::data, "labels must be 0 or 1");
        if (!std::isfinite(scores[i]))
            throw Error(ErrorKind::numeric, "scores must be finite");
        labels[i] == 1 ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw Error(ErrorKind::data, "both classes are required to compute ranking quality");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Count wins in doubled units: a positive above a negative scores 2, a
    // tie scores 1. Everything stays integral until the final division.
    unsigned long long wins2 = 0;
    unsigned long long neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        unsigned long long tie_pos = 0, tie_neg = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            labels[order[j]] == 1 ? ++tie_pos : ++tie_neg;
            ++j;
        }
        wins2 += tie_pos * (2 * neg_below + tie_neg);
        neg_below += tie_neg;
        i = j;
    }
    return static_cast<double>(wins2) / static_cast<double>(2 * n_pos * n_neg);
}

double f1_score(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size())
        throw Error(ErrorKind::shape, "prediction and truth counts differ");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1 && truth[i] == 1) ++tp;
        if (predicted[i] == 1 && truth[i] == 0) ++fp;
        if (predicted[i] == 0 && truth[i] == 1) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(tp) / denom;
}

DpResult dp_gap(std::span<const int> predicted, const std::vector<SubgroupKey>& groups) {
    if (predicted.size() != groups.size())
        throw Error(ErrorKind::shape, "prediction and group counts differ");
    std::map<SubgroupKey, std::pair<std::size_t, std::size_t>> tally;  // (count, positive)
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        auto& t = tally[groups[i]];
        t.first += 1;
        if (predicted[i] == 1) t.second += 1;
    }
    DpResult res;
    if (tally.size() < 2) {
        res.degenerate = true;
        return res;
    }
    std::vector<double> rates;
    rates.reserve(tally.size());
    for (const auto& [g, t] : tally)
        rates.push_back(static_cast<double>(t.second) / static_cast<double>(t.first));
    const auto [mn, mx] = std::minmax_element(rates.begin(), rates.end());
    res.gap = *mx - *mn;
    return res;
}

EodResult eod_gap(std::span<const int> predicted, std::span<const int> truth,
                  const std::vector<SubgroupKey>& groups,
                  const std::vector<std::string>& group_names) {
    if (predicted.size() != truth.size() || predicted.size() != groups.size())
        throw Error(ErrorKind::shape, "prediction, truth and group counts differ");
    struct Cell {
        std::size_t n = 0, pos = 0;
        std::string name;
    };
    std::map<std::pair<SubgroupKey, int>, Cell> cells;
    std::map<SubgroupKey, std::string> names;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        auto& c = cells[{groups[i], truth[i]}];
        c.n += 1;
        if (predicted[i] == 1) c.pos += 1;
        if (i < group_names.size()) names[groups[i]] = group_names[i];
    }
    std::map<SubgroupKey, bool> seen;
    for (const auto& [key, c] : cells) seen[key.first] = true;

    EodResult res;
    if (seen.size() < 2) {
        res.degenerate = true;
        return res;
    }
    // For each true label, the max spread of positive-prediction rates over
    // groups that have that label; groups lacking it are skipped and named.
    double worst = 0.0;
    bool any_label_usable = false;
    for (int y = 0; y < 2; ++y) {
        std::vector<double> rates;
        for (const auto& [g, _] : seen) {
            auto it = cells.find({g, y});
            if (it == cells.end()) {
                res.skipped.push_back(names[g] + "@" + std::to_string(y));
                continue;
            }
            rates.push_back(static_cast<double>(it->second.pos) /
                            static_cast<double>(it->second.n));
        }
        if (rates.size() >= 2) {
            any_label_usable = true;
            const auto [mn, mx] = std::minmax_element(rates.begin(), rates.end());
            worst = std::max(worst, *mx - *mn);
        }
    }
    if (!any_label_usable) {
        res.degenerate = true;
        return res;
    }
    res.gap = worst;
    return res;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    const auto av = a.as_array();
    const auto bv = b.as_array();
    bool strictly = false;
    for (std::size_t k = 0; k < 3; ++k) {
        if (av[k] > bv[k]) return false;
        if (av[k] < bv[k]) strictly = true;
    }
    return strictly;
}

void PipelineConfig::validate() const {
    explain.validate();
    stability.validate();
    mesd.validate();
    if (perturb_k < 1) throw Error(ErrorKind::config, "perturbation count k must be >= 1");
    if (!(perturb_sigma >= 0.0) || !std::isfinite(perturb_sigma))
        throw Error(ErrorKind::config, "perturbation sigma must be finite and >= 0");
    if (!(perturb_mask_prob >= 0.0 && perturb_mask_prob <= 1.0))
        throw Error(ErrorKind::config, "mask probability must lie in [0,1]");
    if (workers < 1) throw Error(ErrorKind::config, "workers must be >= 1");
}

StabilityTable stability_table_for(const TabularDataset& ds, const Predictor& model,
                                   const PipelineConfig& cfg, Split eval_split, rng::Seed seed,
                                   std::vector<InstanceRecord>* records_out) {
    cfg.validate();
    const auto sample = sample_for_stability(ds, eval_split, cfg.stability.sample_max,
                                             rng::derive(seed, {rng::hash_str("sample")}));
    const PerturbConfig perturb = PerturbConfig::for_dataset(
        ds, cfg.perturb_k, cfg.perturb_sigma, cfg.perturb_mask_prob, cfg.perturb_noisy_mask);

    std::vector<InstanceRecord> records(sample.size());
    parallel_for(sample.size(), resolve_workers(cfg.workers), [&](std::size_t i) {
        const std::size_t row = sample[i];
        const InstanceStability s = instance_stability(
            model, ds.X.row(row), cfg.explain, perturb, cfg.stability.inversion,
            rng::derive(seed, {rng::hash_str("row"), row}), row);
        records[i] = InstanceRecord{ds.subgroup_of(row), ds.y[row], s.stability, row};
    });
    if (records_out != nullptr) *records_out = records;
    return aggregate_stability(std::move(records), cfg.stability.lambda);
}

EvaluationResult evaluate_model(const TabularDataset& ds, const Classifier& model,
                                const PipelineConfig& cfg, Split eval_split, rng::Seed seed) {
    cfg.validate();
    EvaluationResult res;
    res.model = model;

    const auto rows = ds.indices(eval_split);
    if (rows.empty())
        throw Error(ErrorKind::data,
                    std::string("split ") + split_name(eval_split) + " is empty");
    const Matrix X = ds.features_of(rows);
    const std::vector<int> y = ds.labels_of(rows);
    const std::vector<double> probs = res.model.predict_proba(X);
    const std::vector<int> pred = res.model.predict_label(X);
    std::vector<SubgroupKey> groups(rows.size());
    std::vector<std::string> names(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        groups[i] = ds.subgroup_of(rows[i]);
        names[i] = ds.group_name(groups[i]);
    }

    res.report.auc = auc_score(probs, y);
    res.report.f1 = f1_score(pred, y);
    res.report.dp = dp_gap(pred, groups);
    res.report.eod = eod_gap(pred, y, groups, names);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& g = res.report.per_group[groups[i]];
        if (g.count == 0) g.name = names[i];
        g.count += 1;
        if (y[i] == 1) g.positives += 1;
        if (pred[i] == 1) g.predicted_pos += 1;
        res.report.group_names[groups[i]] = names[i];
    }
    for (auto& [key, g] : res.report.per_group) {
        g.positive_rate = static_cast<double>(g.predicted_pos) / static_cast<double>(g.count);
        std::size_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (groups[i] != key) continue;
            if (y[i] == 1 && pred[i] == 1) ++tp;
            if (y[i] == 0 && pred[i] == 1) ++fp;
        }
        const std::size_t negatives = g.count - g.positives;
        g.tpr_defined = g.positives > 0;
        g.fpr_defined = negatives > 0;
        g.tpr = g.tpr_defined ? static_cast<double>(tp) / static_cast<double>(g.positives) : 0.0;
        g.fpr = g.fpr_defined ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
    }

    res.stability = stability_table_for(ds, res.model, cfg, eval_split,
                                        rng::derive(seed, {rng::hash_str("stability")}));
    res.report.stability_sample_size = 0;
    for (const auto& [key, cell] : res.stability.cells)
        res.report.stability_sample_size += cell.count;
    res.report.mesd = mesd_from_scores(res.stability.group_scores, cfg.mesd);

    res.objectives.perf = -res.report.auc;
    res.objectives.out = res.report.dp.degenerate ? 0.0 : res.report.dp.gap;
    res.objectives.proc = res.report.mesd.degenerate ? 0.0 : res.report.mesd.mesd_cvar;
    return res;
}

EvaluationResult evaluate_config(const TabularDataset& ds, ModelKind kind,
                                 const HyperParams& hp, const PipelineConfig& cfg,
                                 Split eval_split, rng::Seed seed) {
    cfg.validate();
    Classifier model;
    try {
        model = train(ds, kind, hp, rng::derive(seed, {rng::hash_str("train")}));
    } catch (const TrainingError&) {
        EvaluationResult res;
        res.infeasible = true;
        res.report.infeasible = true;
        res.objectives = kInfeasibleObjectives;
        return res;
    }
    return evaluate_model(ds, model, cfg, eval_split, seed);
}

}  // namespace uef
