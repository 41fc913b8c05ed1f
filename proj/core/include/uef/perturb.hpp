#pragma once

#include <span>
#include <vector>

#include "uef/common.hpp"
#include "uef/dataset.hpp"
#include "uef/rng.hpp"

namespace uef {

// Variant generation around one instance: Gaussian noise on numeric features
// plus Bernoulli masking toward a baseline vector. Masked coordinates take the
// baseline exactly; with `noisy_mask` the noise survives masking on numerics
// (baseline + noise). One-hot dummy blocks carry no noise and are masked as a
// unit so each variant stays a valid encoding.
struct PerturbConfig {
    int k = 25;              // variants per instance, >= 1
    double sigma = 0.1;      // noise scale, >= 0
    double mask_prob = 0.1;  // in [0,1]
    bool noisy_mask = false;

    std::vector<double> baseline;    // length d, model space
    std::vector<int> one_hot_block;  // length d, -1 = numeric; empty = all numeric

    void validate(std::size_t d) const;
    static PerturbConfig for_dataset(const TabularDataset& ds, int k, double sigma,
                                     double mask_prob, bool noisy_mask = false);
};

// k x d matrix of perturbed copies of x. Deterministic in (x, cfg, seed).
Matrix neighborhood(std::span<const double> x, const PerturbConfig& cfg, rng::Seed seed);

}  // namespace uef
