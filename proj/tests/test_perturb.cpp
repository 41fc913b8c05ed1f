#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"
#include "expect.hpp"
#include "uef/common.hpp"
#include "uef/dataset.hpp"
#include "uef/perturb.hpp"

using namespace uef;

namespace {

PerturbConfig numeric_cfg(std::size_t d) {
    PerturbConfig cfg;
    cfg.baseline.assign(d, 0.0);
    return cfg;
}

}  // namespace

TEST_CASE("validation rejects bad perturbation settings") {
    auto cfg = numeric_cfg(3);
    cfg.k = 0;
    CHECK_ERROR_KIND(cfg.validate(3), ErrorKind::config);
    cfg = numeric_cfg(3);
    cfg.mask_prob = 1.5;
    CHECK_ERROR_KIND(cfg.validate(3), ErrorKind::config);
    cfg = numeric_cfg(3);
    cfg.sigma = -0.1;
    CHECK_ERROR_KIND(cfg.validate(3), ErrorKind::config);
    cfg = numeric_cfg(4);  // baseline length 4 vs d 3
    CHECK_ERROR_KIND(cfg.validate(3), ErrorKind::shape);
    cfg = numeric_cfg(3);
    cfg.one_hot_block = {0, 0};
    CHECK_ERROR_KIND(cfg.validate(3), ErrorKind::shape);
}

TEST_CASE("zero noise and zero masking reproduce the instance exactly") {
    auto cfg = numeric_cfg(4);
    cfg.k = 6;
    cfg.sigma = 0.0;
    cfg.mask_prob = 0.0;
    const std::vector<double> x = {1.0, -2.0, 0.5, 3.25};
    const Matrix out = neighborhood(x, cfg, 7);
    REQUIRE(out.rows() == 6);
    REQUIRE(out.cols() == 4);
    for (std::size_t v = 0; v < out.rows(); ++v)
        for (std::size_t j = 0; j < 4; ++j) CHECK(out(v, j) == x[j]);
}

TEST_CASE("certain masking lands exactly on the baseline") {
    auto cfg = numeric_cfg(3);
    cfg.k = 5;
    cfg.sigma = 0.4;
    cfg.mask_prob = 1.0;
    cfg.baseline = {9.0, -9.0, 0.5};
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const Matrix out = neighborhood(x, cfg, 11);
    for (std::size_t v = 0; v < out.rows(); ++v)
        for (std::size_t j = 0; j < 3; ++j) CHECK(out(v, j) == cfg.baseline[j]);
}

TEST_CASE("neighborhood is deterministic in the seed") {
    auto cfg = numeric_cfg(5);
    cfg.k = 8;
    cfg.sigma = 0.3;
    cfg.mask_prob = 0.2;
    const std::vector<double> x = {0.1, 0.2, 0.3, 0.4, 0.5};
    const Matrix a = neighborhood(x, cfg, 42);
    const Matrix b = neighborhood(x, cfg, 42);
    CHECK(a.data() == b.data());
    const Matrix c = neighborhood(x, cfg, 43);
    CHECK(a.data() != c.data());
}

TEST_CASE("one-hot blocks are masked as a unit and carry no noise") {
    // Features: [num, blockA, blockA, blockA, blockB, blockB]
    PerturbConfig cfg;
    cfg.k = 64;
    cfg.sigma = 0.5;
    cfg.mask_prob = 0.5;
    cfg.baseline = {0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    cfg.one_hot_block = {-1, 0, 0, 0, 1, 1};
    const std::vector<double> x = {2.0, 0.0, 1.0, 0.0, 1.0, 0.0};

    const Matrix out = neighborhood(x, cfg, 17);
    bool saw_masked_a = false, saw_kept_a = false;
    for (std::size_t v = 0; v < out.rows(); ++v) {
        // Each block is either x's encoding or the baseline's, never a blend.
        const bool a_is_x =
            out(v, 1) == x[1] && out(v, 2) == x[2] && out(v, 3) == x[3];
        const bool a_is_base = out(v, 1) == cfg.baseline[1] && out(v, 2) == cfg.baseline[2] &&
                               out(v, 3) == cfg.baseline[3];
        CHECK((a_is_x || a_is_base));
        const bool b_is_x = out(v, 4) == x[4] && out(v, 5) == x[5];
        const bool b_is_base = out(v, 4) == cfg.baseline[4] && out(v, 5) == cfg.baseline[5];
        CHECK((b_is_x || b_is_base));
        double block_sum = out(v, 1) + out(v, 2) + out(v, 3);
        CHECK(block_sum == 1.0);
        saw_masked_a = saw_masked_a || a_is_base;
        saw_kept_a = saw_kept_a || a_is_x;
    }
    CHECK(saw_masked_a);
    CHECK(saw_kept_a);
}

TEST_CASE("noisy masking keeps the noise stream; plain masking discards it") {
    auto cfg = numeric_cfg(4);
    cfg.k = 10;
    cfg.sigma = 0.25;
    cfg.baseline = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> x = {-1.0, -2.0, -3.0, -4.0};

    // Same seed, three mask regimes. The draw order contract (noise first,
    // masks second) makes the noise identical across all three.
    auto free_cfg = cfg;
    free_cfg.mask_prob = 0.0;
    const Matrix free = neighborhood(x, free_cfg, 23);

    auto masked_cfg = cfg;
    masked_cfg.mask_prob = 1.0;
    const Matrix masked = neighborhood(x, masked_cfg, 23);

    auto noisy_cfg = masked_cfg;
    noisy_cfg.noisy_mask = true;
    const Matrix noisy = neighborhood(x, noisy_cfg, 23);

    for (std::size_t v = 0; v < 10; ++v) {
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(masked(v, j) == cfg.baseline[j]);
            const double noise = free(v, j) - x[j];
            CHECK(noisy(v, j) == doctest::Approx(cfg.baseline[j] + noise).epsilon(1e-12));
        }
    }
}

TEST_CASE("for_dataset lifts baseline and block map from the schema") {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(80, 5));
    const auto cfg = PerturbConfig::for_dataset(ds, 12, 0.2, 0.05);
    CHECK(cfg.k == 12);
    CHECK(cfg.sigma == 0.2);
    CHECK(cfg.mask_prob == 0.05);
    CHECK(cfg.baseline.size() == ds.d());
    CHECK_NOTHROW(cfg.validate(ds.d()));
    const Matrix out = neighborhood(ds.X.row(0), cfg, 3);
    CHECK(out.rows() == 12);
    CHECK(out.cols() == ds.d());
}
