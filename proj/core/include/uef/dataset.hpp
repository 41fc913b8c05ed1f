#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uef/common.hpp"
#include "uef/rng.hpp"

namespace uef {

enum class FeatureKind { numeric, one_hot };
enum class Split { train, val, test };

const char* split_name(Split s);

struct SplitSpec {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
    rng::Seed seed = 0;

    void validate() const;
    // Rounded counts: train/val by nearest integer, test takes the rest.
    [[nodiscard]] std::array<std::size_t, 3> counts(std::size_t n) const;
};

// Model-space feature description. One-hot expansion happens at load time, so
// feature_names/kinds describe the columns the classifier actually consumes.
struct FeatureSchema {
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    // Dummies originating from the same categorical column share a block id;
    // numeric features carry -1. Masking perturbations reset whole blocks.
    std::vector<int> one_hot_block;
    std::vector<std::string> protected_columns;
    std::string label_column;
    // Per-feature baseline b_j in model space (default: train-split mean,
    // which is 0 for standardized numerics and the prevalence for dummies).
    std::vector<double> baseline_values;
    // Raw -> model transform for numeric features: (x - mean) / std.
    std::vector<double> standardize_mean;
    std::vector<double> standardize_std;

    [[nodiscard]] std::size_t feature_count() const { return feature_names.size(); }
    void validate() const;
    bool operator==(const FeatureSchema&) const = default;
};

struct SubgroupKey {
    std::vector<int> codes;
    auto operator<=>(const SubgroupKey&) const = default;
};

struct ProtectedAttribute {
    std::string name;
    std::vector<std::string> values;  // dense code -> original value
    bool operator==(const ProtectedAttribute&) const = default;
};

struct TabularDataset {
    Matrix X;                    // n x d, standardized model space
    std::vector<int> y;          // {0,1}
    std::vector<int> a_codes;    // n x m protected codes, row-major
    std::vector<Split> split_tag;
    FeatureSchema schema;
    std::vector<ProtectedAttribute> attributes;

    [[nodiscard]] std::size_t n() const { return X.rows(); }
    [[nodiscard]] std::size_t d() const { return X.cols(); }
    [[nodiscard]] std::size_t m() const { return attributes.size(); }

    [[nodiscard]] int attribute_code(std::size_t row, std::size_t attr) const {
        return a_codes[row * m() + attr];
    }

    [[nodiscard]] SubgroupKey subgroup_of(std::size_t row) const;
    [[nodiscard]] std::string group_name(const SubgroupKey& key) const;

    [[nodiscard]] std::vector<std::size_t> indices(Split split) const;
    [[nodiscard]] Matrix features_of(const std::vector<std::size_t>& rows) const;
    [[nodiscard]] std::vector<int> labels_of(const std::vector<std::size_t>& rows) const;

    // De-standardized view of row `row` (raw numeric units); used by tests
    // and report tooling, never by the pipeline itself.
    [[nodiscard]] std::vector<double> destandardized_row(std::size_t row) const;

    void validate() const;
    bool operator==(const TabularDataset&) const = default;
};

struct CensusCell {
    std::size_t count = 0;
    std::size_t count_y0 = 0;
    std::size_t count_y1 = 0;
};

using Census = std::map<SubgroupKey, CensusCell>;

// Realized subgroups only. Counts sum to n and per-label counts to count.
Census subgroup_census(const TabularDataset& ds);
Census subgroup_census(const TabularDataset& ds, Split split);

// ---------------------------------------------------------------------------
// CSV ingestion

struct SchemaConfig {
    std::string label_column;
    std::optional<std::string> positive_label;
    std::vector<std::string> protected_columns;
    bool include_protected_features = false;
    // Keyed by source column name (numeric, raw units) or dummy name
    // "column=value" (taken as-is).
    std::map<std::string, double> baseline_overrides;
    SplitSpec split;

    void validate() const;
};

struct LoadReport {
    std::size_t rows_total = 0;
    std::size_t rows_kept = 0;
    std::map<std::string, std::size_t> rejected;  // reason -> count
};

// Loads a header-carrying UTF-8 CSV, one-hot encodes categorical features,
// maps protected columns to dense codes, standardizes numerics on train-split
// statistics and assigns seeded splits. Rows with missing label, protected or
// feature cells are excluded and counted in the report.
TabularDataset load_csv(const std::string& path, const SchemaConfig& schema,
                        LoadReport* report = nullptr);

TabularDataset load_csv_text(const std::string& text, const SchemaConfig& schema,
                             LoadReport* report = nullptr);

// ---------------------------------------------------------------------------
// Synthetic data

struct SyntheticGroupSpec {
    std::vector<std::string> codes;  // one value per protected attribute
    std::size_t size = 0;
    double positive_rate = 0.5;
    // Fraction of rows whose features are drawn from the flipped class;
    // recorded labels keep the spec'd class balance exactly.
    double label_noise = 0.0;
    double feature_noise = 1.0;
    // Multiplier on the informative-feature class mean; < 1 makes the group
    // genuinely harder to classify instead of just noisier.
    double class_signal = 1.0;
};

struct SyntheticSpec {
    std::vector<ProtectedAttribute> attributes;
    std::vector<SyntheticGroupSpec> groups;
    std::size_t informative_features = 4;
    std::size_t context_features = 2;
    std::size_t nuisance_features = 2;
    double class_separation = 1.6;
    double group_separation = 2.5;
    SplitSpec split;
    rng::Seed seed = 1;

    void validate() const;

    // Four balanced 2x2 groups, no planted pathology.
    static SyntheticSpec balanced(std::size_t total, rng::Seed seed);
    // One group holds `skew` of the mass, the rest split the remainder.
    static SyntheticSpec skewed(std::size_t total, double skew, rng::Seed seed);
    // 2x2 groups where one ~5% group carries heavy label noise; the audit
    // pipeline should surface it as the least stable subgroup.
    static SyntheticSpec planted_instability(std::size_t total, rng::Seed seed);
};

// Deterministic for a fixed spec+seed; group/class counts match the spec
// exactly (label noise flips generating features, not recorded labels).
TabularDataset generate_synthetic(const SyntheticSpec& spec);

// Writes the dataset back out as a raw-units CSV plus a SchemaConfig that
// reloads it; used by the `synth` subcommand.
std::string synthetic_to_csv(const TabularDataset& ds);
SchemaConfig schema_for_synthetic(const TabularDataset& ds, const SyntheticSpec& spec);

}  // namespace uef
