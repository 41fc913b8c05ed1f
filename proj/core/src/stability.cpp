#include "uef/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace uef {

const char* inversion_name(InversionKind kind) {
    return kind == InversionKind::reciprocal ? "reciprocal" : "exponential";
}

InversionKind inversion_from_name(const std::string& name) {
    if (name == "reciprocal") return InversionKind::reciprocal;
    if (name == "exponential") return InversionKind::exponential;
    throw Error(ErrorKind::config, "unknown inversion kind: " + name);
}

double invert_instability(double instability, InversionKind kind) {
    if (!(instability >= 0.0) || !std::isfinite(instability))
        throw Error(ErrorKind::numeric, "instability must be finite and >= 0");
    if (kind == InversionKind::reciprocal) return 1.0 / (1.0 + instability);
    return std::exp(-instability);
}

double attribution_drift(std::span<const double> base, const Matrix& variant_attrs) {
    if (variant_attrs.rows() == 0)
        throw Error(ErrorKind::shape, "need at least one variant attribution");
    if (variant_attrs.cols() != base.size())
        throw Error(ErrorKind::shape, "variant attribution width mismatch");
    KahanSum total;
    for (std::size_t v = 0; v < variant_attrs.rows(); ++v) {
        auto row = variant_attrs.row(v);
        double dist2 = 0.0;
        for (std::size_t j = 0; j < base.size(); ++j) {
            const double diff = base[j] - row[j];
            dist2 += diff * diff;
        }
        total.add(std::sqrt(dist2));
    }
    return total.value() / static_cast<double>(variant_attrs.rows());
}

InstanceStability instance_stability(const Predictor& f, std::span<const double> x,
                                     const ExplainConfig& explain_cfg,
                                     const PerturbConfig& perturb_cfg, InversionKind inversion,
                                     rng::Seed instance_seed, std::size_t row_index) {
    // The base instance and all its variants share one explanation seed
    // (common random numbers): the measured drift is then purely the model's
    // response to the perturbation, and a variant identical to x scores a
    // distance of exactly zero.
    const rng::Seed attr_seed = rng::derive(instance_seed, {rng::hash_str("attr")});
    const Attribution base = ensemble_explain(f, x, perturb_cfg.baseline, explain_cfg, attr_seed);
    const Matrix variants =
        neighborhood(x, perturb_cfg, rng::derive(instance_seed, {rng::hash_str("perturb")}));
    Matrix variant_attrs(variants.rows(), x.size());
    for (std::size_t v = 0; v < variants.rows(); ++v) {
        const Attribution a =
            ensemble_explain(f, variants.row(v), perturb_cfg.baseline, explain_cfg, attr_seed);
        variant_attrs.set_row(v, a.values);
    }
    InstanceStability out;
    out.row_index = row_index;
    out.instability = attribution_drift(base.values, variant_attrs);
    out.stability = invert_instability(out.instability, inversion);
    return out;
}

void StabilityConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw Error(ErrorKind::config, "shrinkage lambda must be finite and > 0");
    if (sample_max < 1) throw Error(ErrorKind::config, "stability sample budget must be >= 1");
}

StabilityTable aggregate_stability(std::vector<InstanceRecord> records, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw Error(ErrorKind::config, "shrinkage lambda must be finite and > 0");
    if (records.empty())
        throw Error(ErrorKind::data, "stability aggregation needs at least one instance");
    for (const auto& r : records) {
        if (r.label != 0 && r.label != 1)
            throw Error(ErrorKind::data, "instance label must be 0 or 1");
        if (!std::isfinite(r.stability))
            throw Error(ErrorKind::numeric, "instance stability must be finite");
    }
    // Canonical order makes the sums independent of caller ordering.
    std::sort(records.begin(), records.end(), [](const InstanceRecord& a, const InstanceRecord& b) {
        if (a.group != b.group) return a.group < b.group;
        if (a.label != b.label) return a.label < b.label;
        return a.row_index < b.row_index;
    });

    StabilityTable table;
    table.lambda = lambda;
    std::map<std::pair<SubgroupKey, int>, KahanSum> cell_sum;
    std::array<KahanSum, 2> label_sum;
    for (const auto& r : records) {
        auto key = std::make_pair(r.group, r.label);
        cell_sum[key].add(r.stability);
        table.cells[key].count += 1;
        label_sum[r.label].add(r.stability);
        table.label_count[r.label] += 1;
    }
    const double total = static_cast<double>(records.size());
    for (int y = 0; y < 2; ++y) {
        table.label_mean[y] = table.label_count[y] > 0
                                  ? label_sum[y].value() / static_cast<double>(table.label_count[y])
                                  : 0.0;
        table.label_weight[y] = static_cast<double>(table.label_count[y]) / total;
    }
    std::set<SubgroupKey> groups;
    for (auto& [key, cell] : table.cells) {
        const double n = static_cast<double>(cell.count);
        cell.raw_mean = cell_sum[key].value() / n;
        cell.alpha = n / (n + lambda);
        cell.shrunk = cell.alpha * cell.raw_mean + (1.0 - cell.alpha) * table.label_mean[key.second];
        groups.insert(key.first);
    }
    for (const auto& g : groups) {
        double score = 0.0;
        for (int y = 0; y < 2; ++y) {
            if (table.label_count[y] == 0) continue;  // weight is zero anyway
            auto it = table.cells.find(std::make_pair(g, y));
            const double cell_value = it != table.cells.end() ? it->second.shrunk
                                                              : table.label_mean[y];
            score += table.label_weight[y] * cell_value;
        }
        table.group_scores[g] = score;
    }
    return table;
}

std::vector<std::size_t> sample_for_stability(const TabularDataset& ds, Split split,
                                              std::size_t n_max, rng::Seed seed) {
    if (n_max < 1) throw Error(ErrorKind::config, "stability sample budget must be >= 1");
    const auto rows = ds.indices(split);
    if (rows.empty())
        throw Error(ErrorKind::data,
                    std::string("split ") + split_name(split) + " has no rows to sample");

    // Cells in canonical (subgroup,label) order; members already ascending.
    std::map<std::pair<SubgroupKey, int>, std::vector<std::size_t>> cells;
    for (std::size_t r : rows) cells[{ds.subgroup_of(r), ds.y[r]}].push_back(r);

    const std::size_t n = rows.size();
    const std::size_t budget = std::min(n_max, n);
    const std::size_t n_cells = cells.size();
    std::vector<std::size_t> alloc(n_cells, 0);
    std::vector<const std::vector<std::size_t>*> members;
    members.reserve(n_cells);
    for (const auto& [key, v] : cells) members.push_back(&v);

    if (budget < n_cells) {
        // Budget cannot cover every cell: favor the largest cells, ties by
        // canonical order.
        std::vector<std::size_t> order(n_cells);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return members[a]->size() > members[b]->size();
        });
        for (std::size_t i = 0; i < budget; ++i) alloc[order[i]] = 1;
    } else {
        // Proportional quotas, floors, then largest remainders.
        std::vector<double> rem(n_cells);
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < n_cells; ++c) {
            const double quota = static_cast<double>(budget) *
                                 static_cast<double>(members[c]->size()) / static_cast<double>(n);
            alloc[c] = static_cast<std::size_t>(quota);
            rem[c] = quota - static_cast<double>(alloc[c]);
            assigned += alloc[c];
        }
        std::vector<std::size_t> order(n_cells);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
        for (std::size_t i = 0; assigned < budget; ++i, ++assigned) alloc[order[i % n_cells]] += 1;
        // Every non-empty cell gets at least one; take from the largest alloc.
        for (std::size_t c = 0; c < n_cells; ++c) {
            while (alloc[c] == 0) {
                std::size_t victim = n_cells;
                for (std::size_t v = 0; v < n_cells; ++v)
                    if (alloc[v] > 1 && (victim == n_cells || alloc[v] > alloc[victim])) victim = v;
                if (victim == n_cells) break;
                alloc[victim] -= 1;
                alloc[c] += 1;
            }
        }
    }

    std::vector<std::size_t> picked;
    picked.reserve(budget);
    std::size_t cell_index = 0;
    for (const auto& [key, v] : cells) {
        const std::size_t take = std::min(alloc[cell_index], v.size());
        if (take == v.size()) {
            picked.insert(picked.end(), v.begin(), v.end());
        } else if (take > 0) {
            std::vector<std::size_t> pool = v;
            rng::Engine eng(rng::derive(seed, {rng::hash_str("cell"), cell_index}));
            eng.shuffle(pool);
            picked.insert(picked.end(), pool.begin(), pool.begin() + take);
        }
        ++cell_index;
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace uef
