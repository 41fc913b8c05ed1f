#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "expect.hpp"
#include "uef/common.hpp"
#include "uef/dataset.hpp"
#include "uef/model.hpp"
#include "uef/stability.hpp"

using namespace uef;

namespace {

InstanceRecord rec(int group_code, int label, double stability, std::size_t row) {
    InstanceRecord r;
    r.group = SubgroupKey{{group_code}};
    r.label = label;
    r.stability = stability;
    r.row_index = row;
    return r;
}

}  // namespace

TEST_CASE("inversion kinds are monotone, bounded, and named") {
    CHECK(invert_instability(0.0, InversionKind::reciprocal) == 1.0);
    CHECK(invert_instability(1.0, InversionKind::reciprocal) == doctest::Approx(0.5));
    CHECK(invert_instability(0.0, InversionKind::exponential) == 1.0);
    CHECK(invert_instability(2.0, InversionKind::exponential) ==
          doctest::Approx(std::exp(-2.0)));
    for (double t : {0.1, 0.5, 3.0})
        CHECK(invert_instability(t + 0.1, InversionKind::reciprocal) <
              invert_instability(t, InversionKind::reciprocal));
    CHECK(inversion_from_name(inversion_name(InversionKind::exponential)) ==
          InversionKind::exponential);
    CHECK_ERROR_KIND(inversion_from_name("tanh"), ErrorKind::config);
}

TEST_CASE("attribution drift is the mean euclidean distance") {
    const std::vector<double> base = {1.0, 0.0};
    Matrix variants(3, 2);
    variants(0, 0) = 0.8;
    variants(0, 1) = 0.2;
    variants(1, 0) = 0.6;
    variants(1, 1) = 0.4;
    variants(2, 0) = 1.0;
    variants(2, 1) = 0.0;
    const double d0 = std::hypot(0.2, 0.2);
    const double d1 = std::hypot(0.4, 0.4);
    const double want = (d0 + d1 + 0.0) / 3.0;
    CHECK(attribution_drift(base, variants) == doctest::Approx(want).epsilon(1e-12));

    Matrix wrong(1, 3);
    CHECK_ERROR_KIND(attribution_drift(base, wrong), ErrorKind::shape);
}

TEST_CASE("identity perturbations give stability exactly 1") {
    // sigma = 0 and mask_prob = 0 make every variant equal x; shared
    // explanation seeds then make every attribution bit-identical.
    const auto ds = generate_synthetic(SyntheticSpec::balanced(120, 9));
    HyperParams hp;
    hp.epochs = 5;
    const auto model = train(ds, ModelKind::logistic, hp, 33);

    ExplainConfig ecfg;
    ecfg.shapley.permutations = 4;
    ecfg.surrogate.samples = 32;
    auto pcfg = PerturbConfig::for_dataset(ds, 5, 0.0, 0.0);

    const auto r =
        instance_stability(model, ds.X.row(3), ecfg, pcfg, InversionKind::reciprocal, 71, 3);
    CHECK(r.instability == 0.0);
    CHECK(r.stability == 1.0);
    CHECK(r.row_index == 3);
}

TEST_CASE("noise strictly lowers stability and stays deterministic") {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(120, 10));
    HyperParams hp;
    hp.epochs = 5;
    const auto model = train(ds, ModelKind::mlp2, hp, 15);

    ExplainConfig ecfg;
    ecfg.shapley.permutations = 4;
    ecfg.surrogate.samples = 32;
    auto quiet = PerturbConfig::for_dataset(ds, 6, 0.0, 0.0);
    auto loud = PerturbConfig::for_dataset(ds, 6, 0.5, 0.2);

    const auto a =
        instance_stability(model, ds.X.row(0), ecfg, loud, InversionKind::reciprocal, 5, 0);
    const auto b =
        instance_stability(model, ds.X.row(0), ecfg, loud, InversionKind::reciprocal, 5, 0);
    CHECK(a.stability == b.stability);

    const auto c =
        instance_stability(model, ds.X.row(0), ecfg, quiet, InversionKind::reciprocal, 5, 0);
    CHECK(a.stability < c.stability);
    CHECK(c.stability == 1.0);
}

TEST_CASE("shrinkage pulls small cells toward the pooled label mean") {
    // One big cell and one singleton, same label. lambda = 2.
    std::vector<InstanceRecord> records;
    for (std::size_t i = 0; i < 8; ++i) records.push_back(rec(0, 1, 0.9, i));
    records.push_back(rec(1, 1, 0.1, 8));

    const auto table = aggregate_stability(records, 2.0);
    const double pooled = (8 * 0.9 + 0.1) / 9.0;
    CHECK(table.label_mean[1] == doctest::Approx(pooled).epsilon(1e-12));

    const auto& big = table.cells.at({SubgroupKey{{0}}, 1});
    CHECK(big.count == 8);
    CHECK(big.alpha == doctest::Approx(8.0 / 10.0));
    CHECK(big.shrunk == doctest::Approx(0.8 * 0.9 + 0.2 * pooled));

    const auto& small = table.cells.at({SubgroupKey{{1}}, 1});
    CHECK(small.alpha == doctest::Approx(1.0 / 3.0));
    CHECK(small.shrunk == doctest::Approx((0.1 + 2.0 * pooled) / 3.0));

    // Label 1 is the only label, so group score equals the shrunk cell value.
    CHECK(table.group_scores.at(SubgroupKey{{1}}) == doctest::Approx(small.shrunk));
}

TEST_CASE("group scores weight labels by prevalence and fill empty cells") {
    // Group 0 has both labels; group 1 only label 0. Label prevalence 6:2.
    std::vector<InstanceRecord> records;
    for (std::size_t i = 0; i < 4; ++i) records.push_back(rec(0, 0, 0.6, i));
    for (std::size_t i = 4; i < 6; ++i) records.push_back(rec(0, 1, 0.9, i));
    for (std::size_t i = 6; i < 8; ++i) records.push_back(rec(1, 0, 0.4, i));

    const double lambda = 1.0;
    const auto table = aggregate_stability(records, lambda);
    const double pooled0 = (4 * 0.6 + 2 * 0.4) / 6.0;
    const double pooled1 = 0.9;
    const double w0 = 6.0 / 8.0, w1 = 2.0 / 8.0;

    const double g0y0 = (4.0 / 5.0) * 0.6 + (1.0 / 5.0) * pooled0;
    const double g0y1 = (2.0 / 3.0) * 0.9 + (1.0 / 3.0) * pooled1;
    CHECK(table.group_scores.at(SubgroupKey{{0}}) ==
          doctest::Approx(w0 * g0y0 + w1 * g0y1).epsilon(1e-12));

    // Group 1 has no label-1 cell: the pooled label-1 mean stands in.
    const double g1y0 = (2.0 / 3.0) * 0.4 + (1.0 / 3.0) * pooled0;
    CHECK(table.group_scores.at(SubgroupKey{{1}}) ==
          doctest::Approx(w0 * g1y0 + w1 * pooled1).epsilon(1e-12));
}

TEST_CASE("aggregation is insensitive to record order") {
    std::vector<InstanceRecord> records;
    rng::Engine eng(77);
    for (std::size_t i = 0; i < 40; ++i)
        records.push_back(
            rec(int(eng.below(3)), int(eng.below(2)), 0.25 + 0.5 * eng.next_double(), i));

    auto shuffled = records;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[0], shuffled[17]);

    const auto a = aggregate_stability(records, 10.0);
    const auto b = aggregate_stability(shuffled, 10.0);
    REQUIRE(a.group_scores.size() == b.group_scores.size());
    for (const auto& [g, score] : a.group_scores) CHECK(score == b.group_scores.at(g));
    CHECK(a.label_mean == b.label_mean);
}

TEST_CASE("aggregation input validation") {
    CHECK_ERROR_KIND(aggregate_stability({}, 10.0), ErrorKind::data);
    CHECK_ERROR_KIND(aggregate_stability({rec(0, 2, 0.5, 0)}, 10.0), ErrorKind::data);
    CHECK_ERROR_KIND(aggregate_stability({rec(0, 1, 0.5, 0)}, 0.0), ErrorKind::config);
    auto bad = rec(0, 1, std::nan(""), 0);
    CHECK_ERROR_KIND(aggregate_stability({bad}, 10.0), ErrorKind::numeric);
}

TEST_CASE("stratified sampling respects quotas, determinism, and cell floors") {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(400, 21));
    const auto rows = sample_for_stability(ds, Split::test, 40, 3);
    CHECK(rows.size() == 40);
    CHECK(std::is_sorted(rows.begin(), rows.end()));
    CHECK(std::set<std::size_t>(rows.begin(), rows.end()).size() == rows.size());
    for (auto r : rows) CHECK(ds.split_tag[r] == Split::test);
    CHECK(rows == sample_for_stability(ds, Split::test, 40, 3));
    CHECK(rows != sample_for_stability(ds, Split::test, 40, 4));

    // Every non-empty (group,label) cell keeps at least one representative.
    std::set<std::pair<SubgroupKey, int>> covered, present;
    for (auto r : rows) covered.insert({ds.subgroup_of(r), ds.y[r]});
    for (auto r : ds.indices(Split::test)) present.insert({ds.subgroup_of(r), ds.y[r]});
    CHECK(covered == present);
}

TEST_CASE("sampling caps at the split size and handles tiny budgets") {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(200, 22));
    const auto split_rows = ds.indices(Split::val);
    const auto all = sample_for_stability(ds, Split::val, 100000, 5);
    CHECK(all == split_rows);

    // Budget below the cell count: largest cells win, result stays sorted.
    const auto two = sample_for_stability(ds, Split::val, 2, 5);
    CHECK(two.size() == 2);
    CHECK(std::is_sorted(two.begin(), two.end()));
    for (auto r : two) CHECK(ds.split_tag[r] == Split::val);
}

TEST_CASE("stability config validation") {
    StabilityConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.lambda = 0.0;
    CHECK_ERROR_KIND(cfg.validate(), ErrorKind::config);
    cfg = StabilityConfig{};
    cfg.sample_max = 0;
    CHECK_ERROR_KIND(cfg.validate(), ErrorKind::config);
}
