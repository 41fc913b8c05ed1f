#include "uef/mesd.hpp"

#include <algorithm>
#include <cmath>

namespace uef {

void MesdConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::config, "tail fraction alpha must lie in (0,1)");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw Error(ErrorKind::config, "epsilon must be finite and > 0");
}

std::vector<PairwiseDisparity> pairwise_disparities(const std::map<SubgroupKey, double>& scores) {
    if (scores.size() < 2)
        throw Error(ErrorKind::data, "pairwise disparities need at least two subgroups");
    for (const auto& [g, s] : scores)
        if (!std::isfinite(s))
            throw Error(ErrorKind::numeric, "subgroup stability score is not finite");
    std::vector<PairwiseDisparity> pairs;
    pairs.reserve(scores.size() * (scores.size() - 1) / 2);
    for (auto it = scores.begin(); it != scores.end(); ++it) {
        for (auto jt = std::next(it); jt != scores.end(); ++jt) {
            PairwiseDisparity p;
            p.group_i = it->first;
            p.group_j = jt->first;
            p.gap = std::abs(it->second - jt->second);
            p.risk = 1.0 - std::min(it->second, jt->second);
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

double interpolated_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorKind::data, "quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::config, "quantile level must lie in [0,1]");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values[0];
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double mesd_max_of(const std::vector<PairwiseDisparity>& pairs) {
    double mx = 0.0;
    for (const auto& p : pairs) mx = std::max(mx, p.gap);
    return mx;
}

double mesd_var_of(const std::vector<PairwiseDisparity>& pairs) {
    if (pairs.empty()) return 0.0;
    KahanSum sum;
    for (const auto& p : pairs) sum.add(p.gap);
    const double mean = sum.value() / static_cast<double>(pairs.size());
    KahanSum sq;
    for (const auto& p : pairs) sq.add((p.gap - mean) * (p.gap - mean));
    return sq.value() / static_cast<double>(pairs.size());
}

MesdResult mesd_cvar(const std::vector<PairwiseDisparity>& pairs, const MesdConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw Error(ErrorKind::data, "tail aggregation needs at least one pair");
    MesdResult res;
    res.alpha = cfg.alpha;
    res.pairs = pairs;
    res.mesd_max = mesd_max_of(pairs);
    res.mesd_var = mesd_var_of(pairs);

    std::vector<double> risks;
    risks.reserve(pairs.size());
    for (const auto& p : pairs) risks.push_back(p.risk);
    res.tau = interpolated_quantile(risks, 1.0 - cfg.alpha);

    res.weights.assign(pairs.size(), 0.0);
    KahanSum excess_total;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double e = std::max(pairs[i].risk - res.tau, 0.0);
        res.weights[i] = e;
        excess_total.add(e);
    }
    if (excess_total.value() > 0.0) {
        const double denom = excess_total.value() + cfg.epsilon;
        KahanSum agg;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            res.weights[i] /= denom;
            agg.add(res.weights[i] * pairs[i].gap);
        }
        res.mesd_cvar = agg.value();
    } else {
        // Flat tail: every risk sits at or below tau. Concentrating the unit
        // mass on the widest-gap tail pair(s) keeps the metric equal to the
        // worst disparity among the risky pairs; a uniform tail average would
        // understate it.
        res.fallback = true;
        double worst = -1.0;
        for (const auto& p : pairs)
            if (p.risk >= res.tau) worst = std::max(worst, p.gap);
        std::vector<std::size_t> winners;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (pairs[i].risk >= res.tau && pairs[i].gap == worst) winners.push_back(i);
        for (std::size_t i : winners) res.weights[i] = 1.0 / static_cast<double>(winners.size());
        res.mesd_cvar = worst;
    }
    return res;
}

MesdResult mesd_from_scores(const std::map<SubgroupKey, double>& scores, const MesdConfig& cfg) {
    cfg.validate();
    if (scores.size() < 2) {
        MesdResult res;
        res.alpha = cfg.alpha;
        res.degenerate = true;
        return res;
    }
    return mesd_cvar(pairwise_disparities(scores), cfg);
}

}  // namespace uef
