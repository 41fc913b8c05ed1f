#include "uef/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uef {
namespace {

void check_vector(const Predictor& f, std::span<const double> x, const char* what) {
    if (x.size() != f.feature_count())
        throw Error(ErrorKind::shape, std::string(what) + " has " + std::to_string(x.size()) +
                                          " entries, model expects " +
                                          std::to_string(f.feature_count()));
}

}  // namespace

void ShapleyConfig::validate() const {
    if (permutations < 1) throw Error(ErrorKind::config, "shapley permutations must be >= 1");
}

void SurrogateConfig::validate() const {
    if (samples < 2) throw Error(ErrorKind::config, "surrogate samples must be >= 2");
    if (!(ridge > 0.0) || !std::isfinite(ridge))
        throw Error(ErrorKind::config, "surrogate ridge must be finite and > 0");
    if (kernel_width > 0.0 && !std::isfinite(kernel_width))
        throw Error(ErrorKind::config, "surrogate kernel width must be finite");
}

double resolve_kernel_width(const SurrogateConfig& cfg, std::size_t d) {
    if (cfg.kernel_width > 0.0) return cfg.kernel_width;
    return 0.75 * std::sqrt(static_cast<double>(d));
}

Attribution explain_shapley(const Predictor& f, std::span<const double> x,
                            std::span<const double> baseline, const ShapleyConfig& cfg,
                            rng::Seed seed) {
    cfg.validate();
    check_vector(f, x, "instance");
    check_vector(f, baseline, "baseline");
    const std::size_t d = x.size();

    // Permutations in antithetic pairs: each sampled pi is followed by its
    // reverse, which cancels positional bias pairwise.
    std::vector<std::vector<std::size_t>> perms;
    perms.reserve(static_cast<std::size_t>(cfg.permutations));
    rng::Engine eng(seed);
    std::vector<std::size_t> pi(d);
    std::iota(pi.begin(), pi.end(), 0);
    while (perms.size() < static_cast<std::size_t>(cfg.permutations)) {
        eng.shuffle(pi);
        perms.push_back(pi);
        if (perms.size() < static_cast<std::size_t>(cfg.permutations)) {
            std::vector<std::size_t> rev(pi.rbegin(), pi.rend());
            perms.push_back(std::move(rev));
        }
    }

    // One batched model call: for each permutation the d+1 prefix states from
    // baseline to x; the marginal of pi[t] is f(state_{t+1}) - f(state_t).
    const std::size_t states = d + 1;
    Matrix batch(perms.size() * states, d);
    for (std::size_t p = 0; p < perms.size(); ++p) {
        std::vector<double> state(baseline.begin(), baseline.end());
        batch.set_row(p * states, state);
        for (std::size_t t = 0; t < d; ++t) {
            state[perms[p][t]] = x[perms[p][t]];
            batch.set_row(p * states + t + 1, state);
        }
    }
    const std::vector<double> out = f.predict_proba(batch);

    Attribution a;
    a.explainer_id = kShapleyId;
    a.values.assign(d, 0.0);
    for (std::size_t p = 0; p < perms.size(); ++p)
        for (std::size_t t = 0; t < d; ++t)
            a.values[perms[p][t]] += out[p * states + t + 1] - out[p * states + t];
    for (double& v : a.values) v /= static_cast<double>(perms.size());
    return a;
}

namespace explain_detail {

// Solve (design' W design + ridge on coefficients) beta = design' W y with an
// intercept column prepended; the intercept is not penalized. Cholesky; the
// system is positive definite because ridge > 0 and total weight > 0.
std::vector<double> weighted_ridge(const Matrix& deltas, const std::vector<double>& weights,
                                   const std::vector<double>& y, double ridge) {
    const std::size_t n = deltas.rows();
    const std::size_t d = deltas.cols();
    if (weights.size() != n || y.size() != n)
        throw Error(ErrorKind::shape, "ridge inputs have inconsistent lengths");
    const std::size_t m = d + 1;
    std::vector<double> A(m * m, 0.0);
    std::vector<double> rhs(m, 0.0);
    std::vector<double> phi(m);
    double total_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(ErrorKind::numeric, "ridge weights must be finite and >= 0");
        total_w += w;
        phi[0] = 1.0;
        auto di = deltas.row(i);
        for (std::size_t j = 0; j < d; ++j) phi[j + 1] = di[j];
        for (std::size_t r = 0; r < m; ++r) {
            const double wr = w * phi[r];
            for (std::size_t c = r; c < m; ++c) A[r * m + c] += wr * phi[c];
            rhs[r] += wr * y[i];
        }
    }
    if (!(total_w > 0.0))
        throw Error(ErrorKind::numeric, "all surrogate sample weights are zero");
    for (std::size_t j = 1; j < m; ++j) A[j * m + j] += ridge;
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < r; ++c) A[r * m + c] = A[c * m + r];

    // In-place Cholesky A = L L'
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            double s = A[r * m + c];
            for (std::size_t k = 0; k < c; ++k) s -= A[r * m + k] * A[c * m + k];
            if (r == c) {
                if (!(s > 0.0))
                    throw Error(ErrorKind::numeric, "surrogate normal matrix not positive definite");
                A[r * m + c] = std::sqrt(s);
            } else {
                A[r * m + c] = s / A[c * m + c];
            }
        }
    }
    std::vector<double> beta(m);
    for (std::size_t r = 0; r < m; ++r) {
        double s = rhs[r];
        for (std::size_t k = 0; k < r; ++k) s -= A[r * m + k] * beta[k];
        beta[r] = s / A[r * m + r];
    }
    for (std::size_t r = m; r-- > 0;) {
        double s = beta[r];
        for (std::size_t k = r + 1; k < m; ++k) s -= A[k * m + r] * beta[k];
        beta[r] = s / A[r * m + r];
    }
    return beta;
}

}  // namespace explain_detail

Attribution explain_surrogate(const Predictor& f, std::span<const double> x,
                              const SurrogateConfig& cfg, rng::Seed seed) {
    cfg.validate();
    check_vector(f, x, "instance");
    const std::size_t d = x.size();
    const std::size_t n = static_cast<std::size_t>(cfg.samples);
    const double width = resolve_kernel_width(cfg, d);

    rng::Engine eng(seed);
    Matrix deltas(n, d);
    Matrix samples(n, d);
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        double dist2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double e = eng.normal();
            deltas(i, j) = e;
            samples(i, j) = x[j] + e;
            dist2 += e * e;
        }
        weights[i] = std::exp(-dist2 / (width * width));
    }
    const std::vector<double> y = f.predict_proba(samples);
    const std::vector<double> beta =
        explain_detail::weighted_ridge(deltas, weights, y, cfg.ridge);

    Attribution a;
    a.explainer_id = kSurrogateId;
    a.values.assign(beta.begin() + 1, beta.end());
    return a;
}

Attribution normalize_l1(Attribution a) {
    double l1 = 0.0;
    for (double v : a.values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::numeric, "attribution has non-finite entry");
        l1 += std::abs(v);
    }
    if (l1 > 0.0)
        for (double& v : a.values) v /= l1;
    a.normalized = true;
    return a;
}

void EnsembleWeights::validate() const {
    if (weights.empty()) throw Error(ErrorKind::config, "ensemble weights are empty");
    double sum = 0.0;
    for (const auto& [id, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error(ErrorKind::config, "ensemble weight for " + id + " must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::config, "ensemble weights must sum to 1");
}

EnsembleWeights EnsembleWeights::uniform(const std::vector<std::string>& ids) {
    if (ids.empty()) throw Error(ErrorKind::config, "no explainers enabled");
    EnsembleWeights w;
    for (const auto& id : ids) w.weights[id] = 1.0 / static_cast<double>(ids.size());
    return w;
}

Attribution ensemble(const std::vector<Attribution>& parts, const EnsembleWeights& w) {
    w.validate();
    if (parts.empty()) throw Error(ErrorKind::contract, "ensemble needs at least one attribution");
    const std::size_t d = parts.front().values.size();
    Attribution out;
    out.explainer_id = kEnsembleId;
    out.values.assign(d, 0.0);
    std::size_t used = 0;
    for (const auto& part : parts) {
        if (!part.normalized)
            throw Error(ErrorKind::contract,
                        "ensemble input " + part.explainer_id + " is not normalized");
        if (part.values.size() != d)
            throw Error(ErrorKind::shape, "ensemble inputs disagree on feature count");
        auto it = w.weights.find(part.explainer_id);
        if (it == w.weights.end())
            throw Error(ErrorKind::config, "no ensemble weight for " + part.explainer_id);
        for (std::size_t j = 0; j < d; ++j) out.values[j] += it->second * part.values[j];
        ++used;
    }
    if (used != w.weights.size())
        throw Error(ErrorKind::config, "ensemble weights cover absent explainers");
    return out;
}

void ExplainConfig::validate() const {
    if (!use_shapley && !use_surrogate)
        throw Error(ErrorKind::config, "at least one explainer must be enabled");
    shapley.validate();
    surrogate.validate();
    if (!weights.empty()) resolved_weights().validate();
}

std::vector<std::string> ExplainConfig::enabled_ids() const {
    std::vector<std::string> ids;
    if (use_shapley) ids.emplace_back(kShapleyId);
    if (use_surrogate) ids.emplace_back(kSurrogateId);
    return ids;
}

EnsembleWeights ExplainConfig::resolved_weights() const {
    const auto ids = enabled_ids();
    if (weights.empty()) return EnsembleWeights::uniform(ids);
    EnsembleWeights w;
    w.weights = weights;
    for (const auto& id : ids)
        if (!w.weights.count(id))
            throw Error(ErrorKind::config, "missing ensemble weight for " + id);
    if (w.weights.size() != ids.size())
        throw Error(ErrorKind::config, "ensemble weights name disabled explainers");
    return w;
}

Attribution ensemble_explain(const Predictor& f, std::span<const double> x,
                             std::span<const double> baseline, const ExplainConfig& cfg,
                             rng::Seed base_seed) {
    cfg.validate();
    const EnsembleWeights w = cfg.resolved_weights();
    std::vector<Attribution> parts;
    if (cfg.use_shapley)
        parts.push_back(normalize_l1(explain_shapley(
            f, x, baseline, cfg.shapley, rng::derive(base_seed, {rng::hash_str(kShapleyId)}))));
    if (cfg.use_surrogate)
        parts.push_back(normalize_l1(explain_surrogate(
            f, x, cfg.surrogate, rng::derive(base_seed, {rng::hash_str(kSurrogateId)}))));
    return ensemble(parts, w);
}

}  // namespace uef
