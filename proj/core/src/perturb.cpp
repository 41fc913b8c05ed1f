#include "uef/perturb.hpp"

#include <cmath>
#include <map>

namespace uef {

void PerturbConfig::validate(std::size_t d) const {
    if (k < 1) throw Error(ErrorKind::config, "perturbation count k must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw Error(ErrorKind::config, "perturbation sigma must be finite and >= 0");
    if (!(mask_prob >= 0.0 && mask_prob <= 1.0))
        throw Error(ErrorKind::config, "mask probability must lie in [0,1]");
    if (baseline.size() != d)
        throw Error(ErrorKind::shape, "perturbation baseline length does not match features");
    if (!one_hot_block.empty() && one_hot_block.size() != d)
        throw Error(ErrorKind::shape, "one-hot block map length does not match features");
}

PerturbConfig PerturbConfig::for_dataset(const TabularDataset& ds, int k, double sigma,
                                         double mask_prob, bool noisy_mask) {
    PerturbConfig cfg;
    cfg.k = k;
    cfg.sigma = sigma;
    cfg.mask_prob = mask_prob;
    cfg.noisy_mask = noisy_mask;
    cfg.baseline = ds.schema.baseline_values;
    cfg.one_hot_block = ds.schema.one_hot_block;
    return cfg;
}

Matrix neighborhood(std::span<const double> x, const PerturbConfig& cfg, rng::Seed seed) {
    const std::size_t d = x.size();
    cfg.validate(d);
    rng::Engine eng(seed);
    Matrix out(static_cast<std::size_t>(cfg.k), d);

    auto block_of = [&](std::size_t j) -> int {
        return cfg.one_hot_block.empty() ? -1 : cfg.one_hot_block[j];
    };

    std::vector<double> noise(d);
    std::vector<bool> masked(d);
    std::map<int, bool> block_mask;
    for (std::size_t v = 0; v < static_cast<std::size_t>(cfg.k); ++v) {
        // Fixed draw order per variant: all noise first, then mask decisions
        // (one per numeric feature, one per one-hot block), so the mask
        // outcome never shifts the noise stream.
        for (std::size_t j = 0; j < d; ++j)
            noise[j] = block_of(j) < 0 ? cfg.sigma * eng.normal() : 0.0;
        block_mask.clear();
        for (std::size_t j = 0; j < d; ++j) {
            const int b = block_of(j);
            if (b < 0) {
                masked[j] = eng.bernoulli(cfg.mask_prob);
            } else {
                if (!block_mask.count(b)) block_mask[b] = eng.bernoulli(cfg.mask_prob);
                masked[j] = block_mask[b];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            if (!masked[j]) {
                out(v, j) = x[j] + noise[j];
            } else if (block_of(j) < 0 && cfg.noisy_mask) {
                out(v, j) = cfg.baseline[j] + noise[j];
            } else {
                out(v, j) = cfg.baseline[j];
            }
        }
    }
    return out;
}

}  // namespace uef
