#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "uef/dataset.hpp"
#include "uef/explain.hpp"
#include "uef/mesd.hpp"
#include "uef/model.hpp"
#include "uef/objectives.hpp"
#include "uef/optimize.hpp"
#include "uef/perturb.hpp"
#include "uef/rng.hpp"
#include "uef/stability.hpp"

namespace {

using namespace uef;

void BM_auc(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    rng::Engine eng(1);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = double(eng.below(64)) / 64.0;  // heavy ties
        labels[i] = int(eng.below(2));
    }
    labels[0] = 0;
    labels[n - 1] = 1;
    for (auto _ : state) benchmark::DoNotOptimize(auc_score(scores, labels));
    state.SetComplexityN(int64_t(n));
}
BENCHMARK(BM_auc)->Range(256, 1 << 15)->Complexity();

void BM_non_dominated_sort(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    rng::Engine eng(2);
    std::vector<ObjectiveVector> objs(n);
    for (auto& o : objs) o = {-eng.next_double(), eng.next_double(), eng.next_double()};
    for (auto _ : state) benchmark::DoNotOptimize(non_dominated_sort(objs));
    state.SetComplexityN(int64_t(n));
}
BENCHMARK(BM_non_dominated_sort)->Range(64, 1 << 12)->Complexity();

void BM_mesd(benchmark::State& state) {
    const std::size_t g = std::size_t(state.range(0));
    rng::Engine eng(3);
    std::map<SubgroupKey, double> scores;
    for (std::size_t i = 0; i < g; ++i) scores[SubgroupKey{{int(i)}}] = eng.next_double();
    const MesdConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(mesd_from_scores(scores, cfg));
}
BENCHMARK(BM_mesd)->RangeMultiplier(2)->Range(4, 64);

void BM_shapley(benchmark::State& state) {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(400, 7));
    HyperParams hp;
    hp.epochs = 10;
    const auto model = train(ds, ModelKind::mlp2, hp, 11);
    const std::vector<double> x(ds.X.row(0).begin(), ds.X.row(0).end());
    ShapleyConfig cfg;
    cfg.permutations = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            explain_shapley(model, x, ds.schema.baseline_values, cfg, 5));
}
BENCHMARK(BM_shapley)->RangeMultiplier(4)->Range(4, 256);

void BM_instance_stability(benchmark::State& state) {
    const auto ds = generate_synthetic(SyntheticSpec::balanced(400, 7));
    HyperParams hp;
    hp.epochs = 10;
    const auto model = train(ds, ModelKind::mlp2, hp, 11);
    ExplainConfig ecfg;
    ecfg.shapley.permutations = 4;
    ecfg.surrogate.samples = 32;
    const auto pcfg = PerturbConfig::for_dataset(ds, int(state.range(0)), 0.1, 0.1);
    for (auto _ : state)
        benchmark::DoNotOptimize(instance_stability(model, ds.X.row(0), ecfg, pcfg,
                                                    InversionKind::reciprocal, 9, 0));
}
BENCHMARK(BM_instance_stability)->RangeMultiplier(2)->Range(4, 32);

}  // namespace

BENCHMARK_MAIN();
