#include "uef/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace uef {

void SyntheticConfig::validate() const {
    if (preset != "balanced" && preset != "skewed" && preset != "planted")
        throw Error(ErrorKind::config, "unknown synthetic preset: " + preset);
    if (total < 40) throw Error(ErrorKind::config, "synthetic total must be >= 40");
    if (preset == "skewed" && !(skew > 0.0 && skew < 1.0))
        throw Error(ErrorKind::config, "synthetic skew must lie in (0,1)");
}

void DatasetConfig::validate() const {
    const bool has_csv = !csv.empty();
    const bool has_synth = synthetic.has_value();
    if (has_csv == has_synth)
        throw Error(ErrorKind::config, "dataset needs exactly one of csv path or synthetic spec");
    if (has_synth) {
        synthetic->validate();
        schema.split.validate();
    } else {
        schema.validate();
    }
}

void ModelConfig::validate() const { hp.validate(); }

void RunConfig::validate() const {
    if (version != 1) throw Error(ErrorKind::config, "unsupported config version");
    dataset.validate();
    model.validate();
    pipeline.validate();
    search.validate();
}

TabularDataset load_dataset(const DatasetConfig& cfg, rng::Seed master_seed,
                            LoadReport* report) {
    cfg.validate();
    if (cfg.synthetic) {
        const SyntheticConfig& s = *cfg.synthetic;
        const rng::Seed seed =
            s.seed != 0 ? s.seed : rng::derive(master_seed, {rng::hash_str("synth")});
        SyntheticSpec spec;
        if (s.preset == "balanced")
            spec = SyntheticSpec::balanced(s.total, seed);
        else if (s.preset == "skewed")
            spec = SyntheticSpec::skewed(s.total, s.skew, seed);
        else
            spec = SyntheticSpec::planted_instability(s.total, seed);
        spec.split = cfg.schema.split;
        if (spec.split.seed == 0)
            spec.split.seed = rng::derive(master_seed, {rng::hash_str("split")});
        if (report != nullptr) {
            report->rows_total = s.total;
            report->rows_kept = s.total;
        }
        return generate_synthetic(spec);
    }
    if (!std::filesystem::exists(cfg.csv))
        throw Error(ErrorKind::io, "dataset file not found: " + cfg.csv);
    SchemaConfig schema = cfg.schema;
    if (schema.split.seed == 0)
        schema.split.seed = rng::derive(master_seed, {rng::hash_str("split")});
    return load_csv(cfg.csv, schema, report);
}

}  // namespace uef
