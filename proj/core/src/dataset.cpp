#include "uef/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace uef {

namespace {

constexpr double kSplitSumTol = 1e-9;
constexpr double kStdFloor = 1e-12;

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?";
}

std::optional<double> try_parse_double(const std::string& text) {
    if (text.empty()) return std::nullopt;
    try {
        return parse_double(text);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// RFC-4180-ish field splitter: quoted fields, doubled-quote escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

std::vector<Split> assign_splits(std::size_t n, const SplitSpec& spec) {
    const auto counts = spec.counts(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng::Engine eng(rng::derive(spec.seed, {rng::hash_str("split")}));
    eng.shuffle(order);
    std::vector<Split> tags(n, Split::test);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < counts[0]; ++i) tags[order[pos++]] = Split::train;
    for (std::size_t i = 0; i < counts[1]; ++i) tags[order[pos++]] = Split::val;
    for (std::size_t i = 0; i < counts[2]; ++i) tags[order[pos++]] = Split::test;
    return tags;
}

// Standardizes numeric columns in place on train-split statistics and fills
// schema baselines (train mean in model space).
void finalize_features(TabularDataset& ds) {
    auto& schema = ds.schema;
    const std::size_t d = ds.d();
    schema.standardize_mean.assign(d, 0.0);
    schema.standardize_std.assign(d, 1.0);
    schema.baseline_values.assign(d, 0.0);

    const auto train_rows = ds.indices(Split::train);
    if (train_rows.empty()) throw Error(ErrorKind::data, "empty train split");

    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t r : train_rows) sum += ds.X(r, j);
        const double mean = sum / static_cast<double>(train_rows.size());
        if (schema.feature_kinds[j] == FeatureKind::numeric) {
            double sq = 0.0;
            for (std::size_t r : train_rows) {
                const double c = ds.X(r, j) - mean;
                sq += c * c;
            }
            double stddev = std::sqrt(sq / static_cast<double>(train_rows.size()));
            if (stddev < kStdFloor) stddev = 1.0;
            schema.standardize_mean[j] = mean;
            schema.standardize_std[j] = stddev;
            for (std::size_t r = 0; r < ds.n(); ++r)
                ds.X(r, j) = (ds.X(r, j) - mean) / stddev;
            schema.baseline_values[j] = 0.0;
        } else {
            // dummies stay 0/1; baseline is the train prevalence
            schema.baseline_values[j] = mean;
        }
    }
}

void apply_baseline_overrides(TabularDataset& ds,
                              const std::map<std::string, double>& overrides,
                              const std::map<std::string, std::string>& dummy_to_source) {
    auto& schema = ds.schema;
    for (std::size_t j = 0; j < schema.feature_count(); ++j) {
        const std::string& name = schema.feature_names[j];
        if (auto it = overrides.find(name); it != overrides.end()) {
            if (schema.feature_kinds[j] == FeatureKind::numeric) {
                schema.baseline_values[j] =
                    (it->second - schema.standardize_mean[j]) / schema.standardize_std[j];
            } else {
                schema.baseline_values[j] = it->second;
            }
            continue;
        }
        // numeric overrides may be keyed by source column == feature name, so
        // only dummy names need the separate lookup path
        auto src = dummy_to_source.find(name);
        if (src != dummy_to_source.end()) {
            if (auto it = overrides.find(src->second); it != overrides.end())
                schema.baseline_values[j] = it->second;
        }
    }
}

}  // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

void SplitSpec::validate() const {
    if (train < 0 || val < 0 || test < 0)
        throw Error(ErrorKind::config, "split fractions must be non-negative");
    if (std::abs(train + val + test - 1.0) > kSplitSumTol)
        throw Error(ErrorKind::config, "split fractions must sum to 1");
}

std::array<std::size_t, 3> SplitSpec::counts(std::size_t n) const {
    validate();
    const auto nn = static_cast<double>(n);
    auto n_train = static_cast<std::size_t>(std::llround(train * nn));
    auto n_val = static_cast<std::size_t>(std::llround(val * nn));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    return {n_train, n_val, n - n_train - n_val};
}

void FeatureSchema::validate() const {
    const std::size_t d = feature_names.size();
    if (feature_kinds.size() != d || one_hot_block.size() != d ||
        baseline_values.size() != d || standardize_mean.size() != d ||
        standardize_std.size() != d)
        throw Error(ErrorKind::schema, "inconsistent feature schema arity");
    if (protected_columns.empty())
        throw Error(ErrorKind::schema, "at least one protected column required");
    for (const auto& p : protected_columns)
        if (p == label_column)
            throw Error(ErrorKind::schema, "protected column equals label column: " + p);
}

SubgroupKey TabularDataset::subgroup_of(std::size_t row) const {
    SubgroupKey key;
    key.codes.resize(m());
    for (std::size_t k = 0; k < m(); ++k) key.codes[k] = attribute_code(row, k);
    return key;
}

std::string TabularDataset::group_name(const SubgroupKey& key) const {
    std::string out;
    for (std::size_t k = 0; k < key.codes.size(); ++k) {
        if (k > 0) out.push_back('_');
        out += attributes[k].values.at(static_cast<std::size_t>(key.codes[k]));
    }
    return out;
}

std::vector<std::size_t> TabularDataset::indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n(); ++i)
        if (split_tag[i] == split) out.push_back(i);
    return out;
}

Matrix TabularDataset::features_of(const std::vector<std::size_t>& rows) const {
    Matrix out(rows.size(), d());
    for (std::size_t i = 0; i < rows.size(); ++i) out.set_row(i, X.row(rows[i]));
    return out;
}

std::vector<int> TabularDataset::labels_of(const std::vector<std::size_t>& rows) const {
    std::vector<int> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = y[rows[i]];
    return out;
}

std::vector<double> TabularDataset::destandardized_row(std::size_t row) const {
    std::vector<double> out(d());
    for (std::size_t j = 0; j < d(); ++j)
        out[j] = X(row, j) * schema.standardize_std[j] + schema.standardize_mean[j];
    return out;
}

void TabularDataset::validate() const {
    schema.validate();
    if (y.size() != n() || split_tag.size() != n() || a_codes.size() != n() * m())
        throw Error(ErrorKind::data, "inconsistent dataset arity");
    for (int label : y)
        if (label != 0 && label != 1)
            throw Error(ErrorKind::data, "labels must be binary");
    for (std::size_t i = 0; i < n(); ++i)
        for (std::size_t k = 0; k < m(); ++k) {
            const int code = attribute_code(i, k);
            if (code < 0 || static_cast<std::size_t>(code) >= attributes[k].values.size())
                throw Error(ErrorKind::data, "protected code out of range");
        }
}

Census subgroup_census(const TabularDataset& ds) {
    Census census;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        auto& cell = census[ds.subgroup_of(i)];
        ++cell.count;
        if (ds.y[i] == 0)
            ++cell.count_y0;
        else
            ++cell.count_y1;
    }
    return census;
}

Census subgroup_census(const TabularDataset& ds, Split split) {
    Census census;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.split_tag[i] != split) continue;
        auto& cell = census[ds.subgroup_of(i)];
        ++cell.count;
        if (ds.y[i] == 0)
            ++cell.count_y0;
        else
            ++cell.count_y1;
    }
    return census;
}

void SchemaConfig::validate() const {
    if (label_column.empty()) throw Error(ErrorKind::schema, "label column not set");
    if (protected_columns.empty())
        throw Error(ErrorKind::schema, "at least one protected column required");
    std::set<std::string> seen;
    for (const auto& p : protected_columns) {
        if (p == label_column)
            throw Error(ErrorKind::schema, "protected column equals label column: " + p);
        if (!seen.insert(p).second)
            throw Error(ErrorKind::schema, "duplicate protected column: " + p);
    }
    split.validate();
}

TabularDataset load_csv(const std::string& path, const SchemaConfig& schema,
                        LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open dataset: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), schema, report);
}

TabularDataset load_csv_text(const std::string& text, const SchemaConfig& schema,
                             LoadReport* report) {
    schema.validate();

    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    {
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            auto fields = split_csv_line(line);
            for (auto& f : fields) f = trimmed(f);
            if (first) {
                header = std::move(fields);
                first = false;
            } else {
                rows.push_back(std::move(fields));
            }
        }
    }
    if (header.empty()) throw Error(ErrorKind::schema, "CSV has no header row");

    auto column_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw Error(ErrorKind::schema, "missing column: " + name);
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t label_idx = column_index(schema.label_column);
    std::vector<std::size_t> protected_idx;
    for (const auto& p : schema.protected_columns) protected_idx.push_back(column_index(p));

    std::vector<std::size_t> feature_idx;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_idx) continue;
        const bool is_protected =
            std::find(protected_idx.begin(), protected_idx.end(), c) != protected_idx.end();
        if (is_protected && !schema.include_protected_features) continue;
        feature_idx.push_back(c);
    }

    LoadReport local_report;
    local_report.rows_total = rows.size();

    // First pass: reject incomplete rows, collect distinct values.
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            ++local_report.rejected["bad_field_count"];
            continue;
        }
        bool reject = false;
        if (is_missing(row[label_idx])) {
            ++local_report.rejected["missing_label"];
            reject = true;
        }
        if (!reject)
            for (std::size_t p : protected_idx)
                if (is_missing(row[p])) {
                    ++local_report.rejected["missing_protected"];
                    reject = true;
                    break;
                }
        if (!reject)
            for (std::size_t f : feature_idx)
                if (is_missing(row[f])) {
                    ++local_report.rejected["missing_feature"];
                    reject = true;
                    break;
                }
        if (!reject) kept.push_back(r);
    }
    if (kept.empty()) throw Error(ErrorKind::data, "no usable rows after filtering");

    // Label mapping.
    std::set<std::string> label_values;
    for (std::size_t r : kept) label_values.insert(rows[r][label_idx]);
    std::string positive;
    if (schema.positive_label) {
        if (label_values.size() > 2)
            throw Error(ErrorKind::data, "label column is not binary");
        positive = *schema.positive_label;
        if (!label_values.count(positive))
            throw Error(ErrorKind::data, "positive label value never occurs: " + positive);
    } else {
        if (label_values.size() != 2 || !label_values.count("0") || !label_values.count("1"))
            throw Error(ErrorKind::data,
                        "label column is not binary {0,1}; set positive_label in the schema");
        positive = "1";
    }

    // Protected attribute codes (sorted distinct values for determinism).
    std::vector<ProtectedAttribute> attributes;
    std::vector<std::map<std::string, int>> code_of(protected_idx.size());
    for (std::size_t k = 0; k < protected_idx.size(); ++k) {
        std::set<std::string> distinct;
        for (std::size_t r : kept) distinct.insert(rows[r][protected_idx[k]]);
        ProtectedAttribute attr;
        attr.name = schema.protected_columns[k];
        for (const auto& v : distinct) {
            code_of[k][v] = static_cast<int>(attr.values.size());
            attr.values.push_back(v);
        }
        attributes.push_back(std::move(attr));
    }

    // Feature typing: numeric iff every kept value parses as a double.
    struct SourceColumn {
        std::size_t csv_idx;
        bool numeric;
        std::vector<std::string> categories;  // sorted, for one-hot columns
    };
    std::vector<SourceColumn> sources;
    for (std::size_t f : feature_idx) {
        SourceColumn src{f, true, {}};
        std::set<std::string> distinct;
        for (std::size_t r : kept) {
            const auto& cell = rows[r][f];
            if (!try_parse_double(cell)) src.numeric = false;
            distinct.insert(cell);
        }
        if (!src.numeric) src.categories.assign(distinct.begin(), distinct.end());
        sources.push_back(std::move(src));
    }

    TabularDataset ds;
    auto& out_schema = ds.schema;
    out_schema.label_column = schema.label_column;
    out_schema.protected_columns = schema.protected_columns;
    std::map<std::string, std::string> dummy_to_source;
    int next_block = 0;
    for (const auto& src : sources) {
        const std::string& col = header[src.csv_idx];
        if (src.numeric) {
            out_schema.feature_names.push_back(col);
            out_schema.feature_kinds.push_back(FeatureKind::numeric);
            out_schema.one_hot_block.push_back(-1);
        } else {
            const int block = next_block++;
            for (const auto& cat : src.categories) {
                const std::string name = col + "=" + cat;
                out_schema.feature_names.push_back(name);
                out_schema.feature_kinds.push_back(FeatureKind::one_hot);
                out_schema.one_hot_block.push_back(block);
                dummy_to_source[name] = col;
            }
        }
    }

    const std::size_t n = kept.size();
    const std::size_t d = out_schema.feature_names.size();
    ds.X = Matrix(n, d);
    ds.y.resize(n);
    ds.a_codes.resize(n * protected_idx.size());
    ds.attributes = std::move(attributes);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[kept[i]];
        ds.y[i] = (row[label_idx] == positive) ? 1 : 0;
        for (std::size_t k = 0; k < protected_idx.size(); ++k)
            ds.a_codes[i * protected_idx.size() + k] = code_of[k].at(row[protected_idx[k]]);
        std::size_t j = 0;
        for (const auto& src : sources) {
            const auto& cell = row[src.csv_idx];
            if (src.numeric) {
                ds.X(i, j++) = parse_double(cell);
            } else {
                for (const auto& cat : src.categories) ds.X(i, j++) = (cell == cat) ? 1.0 : 0.0;
            }
        }
    }

    ds.split_tag = assign_splits(n, schema.split);
    finalize_features(ds);
    apply_baseline_overrides(ds, schema.baseline_overrides, dummy_to_source);

    local_report.rows_kept = n;
    if (report) *report = local_report;
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// Synthetic generation

void SyntheticSpec::validate() const {
    if (groups.empty()) throw Error(ErrorKind::config, "synthetic spec has no groups");
    if (attributes.empty()) throw Error(ErrorKind::config, "synthetic spec has no attributes");
    for (const auto& g : groups) {
        if (g.size < 1) throw Error(ErrorKind::config, "synthetic group size must be >= 1");
        if (g.codes.size() != attributes.size())
            throw Error(ErrorKind::config, "group codes arity mismatch");
        if (g.positive_rate < 0.0 || g.positive_rate > 1.0)
            throw Error(ErrorKind::config, "positive_rate must lie in [0,1]");
        if (g.label_noise < 0.0 || g.label_noise > 1.0)
            throw Error(ErrorKind::config, "label_noise must lie in [0,1]");
        if (!(g.feature_noise >= 0.0) || !(g.class_signal >= 0.0))
            throw Error(ErrorKind::config, "noise and signal scales must be >= 0");
    }
    if (informative_features == 0)
        throw Error(ErrorKind::config, "need at least one informative feature");
    split.validate();
}

TabularDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    std::vector<std::map<std::string, int>> code_of(spec.attributes.size());
    for (std::size_t k = 0; k < spec.attributes.size(); ++k)
        for (std::size_t v = 0; v < spec.attributes[k].values.size(); ++v)
            code_of[k][spec.attributes[k].values[v]] = static_cast<int>(v);

    const std::size_t p_inf = spec.informative_features;
    const std::size_t p_ctx = spec.context_features;
    const std::size_t p_nui = spec.nuisance_features;
    const std::size_t d = p_inf + p_ctx + p_nui;

    std::size_t n = 0;
    for (const auto& g : spec.groups) n += g.size;

    TabularDataset ds;
    ds.X = Matrix(n, d);
    ds.y.resize(n);
    ds.a_codes.resize(n * spec.attributes.size());
    ds.attributes = spec.attributes;

    auto& schema = ds.schema;
    for (std::size_t j = 0; j < p_inf; ++j) schema.feature_names.push_back("inf" + std::to_string(j));
    for (std::size_t j = 0; j < p_ctx; ++j) schema.feature_names.push_back("ctx" + std::to_string(j));
    for (std::size_t j = 0; j < p_nui; ++j) schema.feature_names.push_back("nui" + std::to_string(j));
    schema.feature_kinds.assign(d, FeatureKind::numeric);
    schema.one_hot_block.assign(d, -1);
    for (const auto& attr : spec.attributes) schema.protected_columns.push_back(attr.name);
    schema.label_column = "label";

    // Group centroids in context space: evenly spaced on a circle (or a line
    // when only one context feature exists) so groups stay identifiable from
    // features even though protected columns never feed the model.
    const std::size_t n_groups = spec.groups.size();
    std::vector<std::vector<double>> centroids(n_groups, std::vector<double>(p_ctx, 0.0));
    for (std::size_t g = 0; g < n_groups; ++g) {
        if (p_ctx == 1) {
            centroids[g][0] =
                (static_cast<double>(g) - static_cast<double>(n_groups - 1) / 2.0) *
                spec.group_separation;
        } else if (p_ctx >= 2) {
            const double angle =
                2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(n_groups);
            centroids[g][0] = spec.group_separation * std::cos(angle);
            centroids[g][1] = spec.group_separation * std::sin(angle);
        }
    }
    constexpr double kContextSpread = 0.3;
    const double inf_scale = spec.class_separation / std::sqrt(static_cast<double>(p_inf));

    std::size_t row = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        const auto& gspec = spec.groups[g];
        rng::Engine eng(rng::derive(spec.seed, {rng::hash_str("group"), g}));

        const auto n_pos = static_cast<std::size_t>(
            std::llround(gspec.positive_rate * static_cast<double>(gspec.size)));
        std::vector<int> labels(gspec.size, 0);
        for (std::size_t i = 0; i < std::min(n_pos, gspec.size); ++i) labels[i] = 1;
        eng.shuffle(labels);

        // rows whose features come from the flipped class
        std::vector<std::size_t> order(gspec.size);
        for (std::size_t i = 0; i < gspec.size; ++i) order[i] = i;
        eng.shuffle(order);
        const auto n_flip = static_cast<std::size_t>(
            std::llround(gspec.label_noise * static_cast<double>(gspec.size)));
        std::vector<char> flipped(gspec.size, 0);
        for (std::size_t i = 0; i < std::min(n_flip, gspec.size); ++i) flipped[order[i]] = 1;

        for (std::size_t i = 0; i < gspec.size; ++i, ++row) {
            const int label = labels[i];
            const int y_eff = flipped[i] ? 1 - label : label;
            const double sign = y_eff == 1 ? 1.0 : -1.0;
            ds.y[row] = label;
            for (std::size_t k = 0; k < spec.attributes.size(); ++k) {
                auto it = code_of[k].find(gspec.codes[k]);
                if (it == code_of[k].end())
                    throw Error(ErrorKind::config, "unknown attribute value: " + gspec.codes[k]);
                ds.a_codes[row * spec.attributes.size() + k] = it->second;
            }
            std::size_t j = 0;
            for (std::size_t f = 0; f < p_inf; ++f)
                ds.X(row, j++) =
                    sign * inf_scale * gspec.class_signal + gspec.feature_noise * eng.normal();
            for (std::size_t f = 0; f < p_ctx; ++f)
                ds.X(row, j++) = centroids[g][f] + kContextSpread * eng.normal();
            for (std::size_t f = 0; f < p_nui; ++f) ds.X(row, j++) = eng.normal();
        }
    }

    SplitSpec split = spec.split;
    if (split.seed == 0) split.seed = rng::derive(spec.seed, {rng::hash_str("splitseed")});
    ds.split_tag = assign_splits(n, split);
    finalize_features(ds);
    ds.validate();
    return ds;
}

SyntheticSpec SyntheticSpec::balanced(std::size_t total, rng::Seed seed) {
    SyntheticSpec spec;
    spec.attributes = {{"race", {"a", "b"}}, {"sex", {"x", "y"}}};
    const std::size_t quarter = total / 4;
    for (const auto& codes :
         std::vector<std::vector<std::string>>{{"a", "x"}, {"a", "y"}, {"b", "x"}, {"b", "y"}}) {
        SyntheticGroupSpec g;
        g.codes = codes;
        g.size = quarter;
        spec.groups.push_back(g);
    }
    spec.seed = seed;
    return spec;
}

SyntheticSpec SyntheticSpec::skewed(std::size_t total, double skew, rng::Seed seed) {
    if (skew <= 0.0 || skew >= 1.0)
        throw Error(ErrorKind::config, "skew must lie in (0,1)");
    SyntheticSpec spec = balanced(total, seed);
    const auto big = static_cast<std::size_t>(std::llround(skew * static_cast<double>(total)));
    const std::size_t rest = (total - big) / 3;
    spec.groups[0].size = big;
    for (std::size_t g = 1; g < spec.groups.size(); ++g) spec.groups[g].size = std::max<std::size_t>(1, rest);
    return spec;
}

SyntheticSpec SyntheticSpec::planted_instability(std::size_t total, rng::Seed seed) {
    SyntheticSpec spec = balanced(total, seed);
    // one small, noisy group; the rest share the remaining mass
    const std::size_t small = std::max<std::size_t>(8, total / 20);
    const std::size_t rest = (total - small) / 3;
    for (std::size_t g = 0; g + 1 < spec.groups.size(); ++g) spec.groups[g].size = rest;
    // Contradictory labels plus weak feature signal leave any fitted model
    // uncertain across the group's region; uncertain predictions are where
    // attributions drift under perturbation, which the audit should surface.
    auto& noisy = spec.groups.back();
    noisy.size = small;
    noisy.label_noise = 0.35;
    noisy.class_signal = 0.35;
    return spec;
}

std::string synthetic_to_csv(const TabularDataset& ds) {
    std::string out;
    for (std::size_t k = 0; k < ds.m(); ++k) {
        out += ds.attributes[k].name;
        out.push_back(',');
    }
    for (std::size_t j = 0; j < ds.d(); ++j) {
        out += ds.schema.feature_names[j];
        out.push_back(',');
    }
    out += ds.schema.label_column;
    out.push_back('\n');
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto raw = ds.destandardized_row(i);
        for (std::size_t k = 0; k < ds.m(); ++k) {
            out += ds.attributes[k].values[static_cast<std::size_t>(ds.attribute_code(i, k))];
            out.push_back(',');
        }
        for (std::size_t j = 0; j < ds.d(); ++j) {
            out += format_double_17(raw[j]);
            out.push_back(',');
        }
        out += std::to_string(ds.y[i]);
        out.push_back('\n');
    }
    return out;
}

SchemaConfig schema_for_synthetic(const TabularDataset& ds, const SyntheticSpec& spec) {
    SchemaConfig schema;
    schema.label_column = ds.schema.label_column;
    schema.protected_columns = ds.schema.protected_columns;
    schema.split = spec.split;
    if (schema.split.seed == 0)
        schema.split.seed = rng::derive(spec.seed, {rng::hash_str("splitseed")});
    return schema;
}

}  // namespace uef
