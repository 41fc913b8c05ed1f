#pragma once

#include <optional>
#include <string>

#include "uef/dataset.hpp"
#include "uef/model.hpp"
#include "uef/objectives.hpp"
#include "uef/optimize.hpp"

namespace uef {

// Inline synthetic dataset request; makes a run directory self-contained
// with no external CSV dependency.
struct SyntheticConfig {
    std::string preset;  // "balanced" | "skewed" | "planted"
    std::size_t total = 1200;
    double skew = 0.7;        // only for "skewed"
    rng::Seed seed = 0;       // 0 = derived from master seed

    void validate() const;
};

struct DatasetConfig {
    std::string csv;  // path; exactly one of csv / synthetic must be set
    std::optional<SyntheticConfig> synthetic;
    SchemaConfig schema;  // ignored except split when synthetic is set

    void validate() const;
};

struct ModelConfig {
    ModelKind kind = ModelKind::logistic;
    HyperParams hp;
    std::string load;  // optional path to a serialized model; skips training

    void validate() const;
};

struct RunConfig {
    int version = 1;
    DatasetConfig dataset;
    ModelConfig model;       // used by audit
    PipelineConfig pipeline; // explainers, perturbation, stability, disparity
    SearchConfig search;     // used by optimize
    rng::Seed master_seed = 42;

    void validate() const;
};

// Materializes the dataset: loads the CSV or generates the synthetic preset.
// A synthetic seed of 0 resolves against the master seed, as does a split
// seed of 0, so a config plus master seed pins the data exactly.
TabularDataset load_dataset(const DatasetConfig& cfg, rng::Seed master_seed,
                            LoadReport* report = nullptr);

}  // namespace uef
