#include "uef/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uef {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail_schema(const std::string& what) { throw Error(ErrorKind::schema, what); }

const ordered_json& require(const ordered_json& obj, const std::string& key,
                            const std::string& where) {
    if (!obj.is_object()) fail_schema(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail_schema(where + " is missing key \"" + key + "\"");
    return *it;
}

double as_double(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) fail_schema(where + " must be a number");
    return v.get<double>();
}

int as_int(const ordered_json& v, const std::string& where) {
    if (!v.is_number_integer()) fail_schema(where + " must be an integer");
    return v.get<int>();
}

rng::Seed as_seed(const ordered_json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail_schema(where + " must be an integer seed");
    if (v.is_number_integer() && v.get<long long>() < 0)
        fail_schema(where + " must be a nonnegative seed");
    return v.get<rng::Seed>();
}

bool as_bool(const ordered_json& v, const std::string& where) {
    if (!v.is_boolean()) fail_schema(where + " must be a boolean");
    return v.get<bool>();
}

std::string as_string(const ordered_json& v, const std::string& where) {
    if (!v.is_string()) fail_schema(where + " must be a string");
    return v.get<std::string>();
}

void reject_unknown(const ordered_json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) {
                ok = true;
                break;
            }
        if (!ok) fail_schema(where + " has unknown key \"" + key + "\"");
    }
}

ordered_json genome_json(const Genome& g) {
    ordered_json j;
    j["threshold"] = g.genes[0];
    j["log10_l2"] = g.genes[1];
    j["log10_lr"] = g.genes[2];
    j["epochs"] = g.genes[3];
    j["dropout"] = g.genes[4];
    return j;
}

Genome genome_from_json(const ordered_json& j, const std::string& where) {
    reject_unknown(j, {"threshold", "log10_l2", "log10_lr", "epochs", "dropout"}, where);
    Genome g;
    g.genes[0] = as_double(require(j, "threshold", where), where + ".threshold");
    g.genes[1] = as_double(require(j, "log10_l2", where), where + ".log10_l2");
    g.genes[2] = as_double(require(j, "log10_lr", where), where + ".log10_lr");
    g.genes[3] = as_double(require(j, "epochs", where), where + ".epochs");
    g.genes[4] = as_double(require(j, "dropout", where), where + ".dropout");
    return g;
}

ordered_json objectives_json(const ObjectiveVector& o) {
    ordered_json j;
    j["perf"] = o.perf;
    j["out"] = o.out;
    j["proc"] = o.proc;
    return j;
}

ObjectiveVector objectives_from_json(const ordered_json& j, const std::string& where) {
    ObjectiveVector o;
    o.perf = as_double(require(j, "perf", where), where + ".perf");
    o.out = as_double(require(j, "out", where), where + ".out");
    o.proc = as_double(require(j, "proc", where), where + ".proc");
    return o;
}

ordered_json hp_json(const HyperParams& hp) {
    ordered_json j;
    j["threshold"] = hp.threshold;
    j["l2"] = hp.l2;
    j["learning_rate"] = hp.learning_rate;
    j["epochs"] = hp.epochs;
    j["dropout"] = hp.dropout;
    return j;
}

HyperParams hp_from_json(const ordered_json& j, const std::string& where) {
    reject_unknown(j, {"threshold", "l2", "learning_rate", "epochs", "dropout"}, where);
    HyperParams hp;
    hp.threshold = as_double(require(j, "threshold", where), where + ".threshold");
    hp.l2 = as_double(require(j, "l2", where), where + ".l2");
    hp.learning_rate = as_double(require(j, "learning_rate", where), where + ".learning_rate");
    hp.epochs = as_int(require(j, "epochs", where), where + ".epochs");
    hp.dropout = as_double(require(j, "dropout", where), where + ".dropout");
    return hp;
}

}  // namespace

std::string render_number(double v) { return ordered_json(v).dump(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::io, "read failed: " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed: " + path);
}

std::string serialize_run_config(const RunConfig& cfg) {
    cfg.validate();
    ordered_json j;
    j["version"] = cfg.version;
    j["master_seed"] = cfg.master_seed;

    ordered_json ds;
    if (cfg.dataset.synthetic) {
        ordered_json s;
        s["preset"] = cfg.dataset.synthetic->preset;
        s["total"] = cfg.dataset.synthetic->total;
        s["skew"] = cfg.dataset.synthetic->skew;
        s["seed"] = cfg.dataset.synthetic->seed;
        ds["synthetic"] = s;
    } else {
        ds["csv"] = cfg.dataset.csv;
        ds["label_column"] = cfg.dataset.schema.label_column;
        if (cfg.dataset.schema.positive_label)
            ds["positive_label"] = *cfg.dataset.schema.positive_label;
        else
            ds["positive_label"] = nullptr;
        ds["protected_columns"] = cfg.dataset.schema.protected_columns;
        ds["include_protected_features"] = cfg.dataset.schema.include_protected_features;
        ordered_json overrides = ordered_json::object();
        for (const auto& [col, v] : cfg.dataset.schema.baseline_overrides) overrides[col] = v;
        ds["baseline_overrides"] = overrides;
    }
    ordered_json split;
    split["train"] = cfg.dataset.schema.split.train;
    split["val"] = cfg.dataset.schema.split.val;
    split["test"] = cfg.dataset.schema.split.test;
    split["seed"] = cfg.dataset.schema.split.seed;
    ds["split"] = split;
    j["dataset"] = ds;

    ordered_json model;
    model["kind"] = model_kind_name(cfg.model.kind);
    model["threshold"] = cfg.model.hp.threshold;
    model["l2"] = cfg.model.hp.l2;
    model["learning_rate"] = cfg.model.hp.learning_rate;
    model["epochs"] = cfg.model.hp.epochs;
    model["dropout"] = cfg.model.hp.dropout;
    if (!cfg.model.load.empty()) model["load"] = cfg.model.load;
    j["model"] = model;

    ordered_json ex;
    ex["use_shapley"] = cfg.pipeline.explain.use_shapley;
    ex["use_surrogate"] = cfg.pipeline.explain.use_surrogate;
    ordered_json weights = ordered_json::object();
    for (const auto& [id, w] : cfg.pipeline.explain.resolved_weights().weights) weights[id] = w;
    ex["weights"] = weights;
    ex["shapley"] = ordered_json{{"permutations", cfg.pipeline.explain.shapley.permutations}};
    ex["surrogate"] = ordered_json{{"samples", cfg.pipeline.explain.surrogate.samples},
                                   {"kernel_width", cfg.pipeline.explain.surrogate.kernel_width},
                                   {"ridge", cfg.pipeline.explain.surrogate.ridge}};
    j["explainers"] = ex;

    j["perturb"] = ordered_json{{"k", cfg.pipeline.perturb_k},
                                {"sigma", cfg.pipeline.perturb_sigma},
                                {"mask_prob", cfg.pipeline.perturb_mask_prob},
                                {"noisy_mask", cfg.pipeline.perturb_noisy_mask}};
    j["stability"] = ordered_json{{"lambda", cfg.pipeline.stability.lambda},
                                  {"sample_max", cfg.pipeline.stability.sample_max},
                                  {"inversion", inversion_name(cfg.pipeline.stability.inversion)}};
    j["mesd"] = ordered_json{{"alpha", cfg.pipeline.mesd.alpha},
                             {"epsilon", cfg.pipeline.mesd.epsilon}};
    j["search"] = ordered_json{{"population", cfg.search.population},
                               {"generations", cfg.search.generations},
                               {"crossover_prob", cfg.search.crossover_prob},
                               {"eta_crossover", cfg.search.eta_crossover},
                               {"mutation_prob", cfg.search.mutation_prob},
                               {"eta_mutation", cfg.search.eta_mutation},
                               {"theoretical_ideal", cfg.search.theoretical_ideal}};
    return j.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        fail_schema(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"version", "master_seed", "dataset", "model", "explainers", "perturb",
                    "stability", "mesd", "search"},
                   "config");
    RunConfig cfg;
    cfg.version = as_int(require(j, "version", "config"), "config.version");
    cfg.master_seed = as_seed(require(j, "master_seed", "config"), "config.master_seed");

    const ordered_json& ds = require(j, "dataset", "config");
    reject_unknown(ds,
                   {"csv", "synthetic", "label_column", "positive_label", "protected_columns",
                    "include_protected_features", "baseline_overrides", "split"},
                   "dataset");
    if (ds.contains("synthetic")) {
        const ordered_json& s = ds["synthetic"];
        reject_unknown(s, {"preset", "total", "skew", "seed"}, "dataset.synthetic");
        SyntheticConfig sc;
        sc.preset = as_string(require(s, "preset", "dataset.synthetic"), "preset");
        sc.total = static_cast<std::size_t>(
            as_int(require(s, "total", "dataset.synthetic"), "total"));
        if (s.contains("skew")) sc.skew = as_double(s["skew"], "dataset.synthetic.skew");
        if (s.contains("seed")) sc.seed = as_seed(s["seed"], "dataset.synthetic.seed");
        cfg.dataset.synthetic = sc;
    }
    if (ds.contains("csv")) cfg.dataset.csv = as_string(ds["csv"], "dataset.csv");
    if (ds.contains("label_column"))
        cfg.dataset.schema.label_column = as_string(ds["label_column"], "dataset.label_column");
    if (ds.contains("positive_label") && !ds["positive_label"].is_null())
        cfg.dataset.schema.positive_label =
            as_string(ds["positive_label"], "dataset.positive_label");
    if (ds.contains("protected_columns")) {
        if (!ds["protected_columns"].is_array())
            fail_schema("dataset.protected_columns must be an array");
        for (const auto& c : ds["protected_columns"])
            cfg.dataset.schema.protected_columns.push_back(
                as_string(c, "dataset.protected_columns[]"));
    }
    if (ds.contains("include_protected_features"))
        cfg.dataset.schema.include_protected_features =
            as_bool(ds["include_protected_features"], "dataset.include_protected_features");
    if (ds.contains("baseline_overrides")) {
        if (!ds["baseline_overrides"].is_object())
            fail_schema("dataset.baseline_overrides must be an object");
        for (const auto& [col, v] : ds["baseline_overrides"].items())
            cfg.dataset.schema.baseline_overrides[col] =
                as_double(v, "dataset.baseline_overrides." + col);
    }
    if (ds.contains("split")) {
        const ordered_json& sp = ds["split"];
        reject_unknown(sp, {"train", "val", "test", "seed"}, "dataset.split");
        cfg.dataset.schema.split.train = as_double(require(sp, "train", "split"), "split.train");
        cfg.dataset.schema.split.val = as_double(require(sp, "val", "split"), "split.val");
        cfg.dataset.schema.split.test = as_double(require(sp, "test", "split"), "split.test");
        if (sp.contains("seed")) cfg.dataset.schema.split.seed = as_seed(sp["seed"], "split.seed");
    }

    if (j.contains("model")) {
        const ordered_json& m = j["model"];
        reject_unknown(m, {"kind", "threshold", "l2", "learning_rate", "epochs", "dropout", "load"},
                       "model");
        if (m.contains("kind"))
            cfg.model.kind = model_kind_from_name(as_string(m["kind"], "model.kind"));
        if (m.contains("threshold"))
            cfg.model.hp.threshold = as_double(m["threshold"], "model.threshold");
        if (m.contains("l2")) cfg.model.hp.l2 = as_double(m["l2"], "model.l2");
        if (m.contains("learning_rate"))
            cfg.model.hp.learning_rate = as_double(m["learning_rate"], "model.learning_rate");
        if (m.contains("epochs")) cfg.model.hp.epochs = as_int(m["epochs"], "model.epochs");
        if (m.contains("dropout")) cfg.model.hp.dropout = as_double(m["dropout"], "model.dropout");
        if (m.contains("load")) cfg.model.load = as_string(m["load"], "model.load");
    }

    if (j.contains("explainers")) {
        const ordered_json& ex = j["explainers"];
        reject_unknown(ex, {"use_shapley", "use_surrogate", "weights", "shapley", "surrogate"},
                       "explainers");
        if (ex.contains("use_shapley"))
            cfg.pipeline.explain.use_shapley = as_bool(ex["use_shapley"], "use_shapley");
        if (ex.contains("use_surrogate"))
            cfg.pipeline.explain.use_surrogate = as_bool(ex["use_surrogate"], "use_surrogate");
        if (ex.contains("weights")) {
            if (!ex["weights"].is_object()) fail_schema("explainers.weights must be an object");
            for (const auto& [id, w] : ex["weights"].items())
                cfg.pipeline.explain.weights[id] = as_double(w, "explainers.weights." + id);
        }
        if (ex.contains("shapley")) {
            reject_unknown(ex["shapley"], {"permutations"}, "explainers.shapley");
            if (ex["shapley"].contains("permutations"))
                cfg.pipeline.explain.shapley.permutations =
                    as_int(ex["shapley"]["permutations"], "shapley.permutations");
        }
        if (ex.contains("surrogate")) {
            reject_unknown(ex["surrogate"], {"samples", "kernel_width", "ridge"},
                           "explainers.surrogate");
            const ordered_json& su = ex["surrogate"];
            if (su.contains("samples"))
                cfg.pipeline.explain.surrogate.samples = as_int(su["samples"], "surrogate.samples");
            if (su.contains("kernel_width"))
                cfg.pipeline.explain.surrogate.kernel_width =
                    as_double(su["kernel_width"], "surrogate.kernel_width");
            if (su.contains("ridge"))
                cfg.pipeline.explain.surrogate.ridge = as_double(su["ridge"], "surrogate.ridge");
        }
    }

    if (j.contains("perturb")) {
        const ordered_json& p = j["perturb"];
        reject_unknown(p, {"k", "sigma", "mask_prob", "noisy_mask"}, "perturb");
        if (p.contains("k")) cfg.pipeline.perturb_k = as_int(p["k"], "perturb.k");
        if (p.contains("sigma")) cfg.pipeline.perturb_sigma = as_double(p["sigma"], "perturb.sigma");
        if (p.contains("mask_prob"))
            cfg.pipeline.perturb_mask_prob = as_double(p["mask_prob"], "perturb.mask_prob");
        if (p.contains("noisy_mask"))
            cfg.pipeline.perturb_noisy_mask = as_bool(p["noisy_mask"], "perturb.noisy_mask");
    }

    if (j.contains("stability")) {
        const ordered_json& st = j["stability"];
        reject_unknown(st, {"lambda", "sample_max", "inversion"}, "stability");
        if (st.contains("lambda"))
            cfg.pipeline.stability.lambda = as_double(st["lambda"], "stability.lambda");
        if (st.contains("sample_max"))
            cfg.pipeline.stability.sample_max =
                static_cast<std::size_t>(as_int(st["sample_max"], "stability.sample_max"));
        if (st.contains("inversion"))
            cfg.pipeline.stability.inversion =
                inversion_from_name(as_string(st["inversion"], "stability.inversion"));
    }

    if (j.contains("mesd")) {
        const ordered_json& m = j["mesd"];
        reject_unknown(m, {"alpha", "epsilon"}, "mesd");
        if (m.contains("alpha")) cfg.pipeline.mesd.alpha = as_double(m["alpha"], "mesd.alpha");
        if (m.contains("epsilon"))
            cfg.pipeline.mesd.epsilon = as_double(m["epsilon"], "mesd.epsilon");
    }

    if (j.contains("search")) {
        const ordered_json& s = j["search"];
        reject_unknown(s,
                       {"population", "generations", "crossover_prob", "eta_crossover",
                        "mutation_prob", "eta_mutation", "theoretical_ideal"},
                       "search");
        if (s.contains("population"))
            cfg.search.population = as_int(s["population"], "search.population");
        if (s.contains("generations"))
            cfg.search.generations = as_int(s["generations"], "search.generations");
        if (s.contains("crossover_prob"))
            cfg.search.crossover_prob = as_double(s["crossover_prob"], "search.crossover_prob");
        if (s.contains("eta_crossover"))
            cfg.search.eta_crossover = as_double(s["eta_crossover"], "search.eta_crossover");
        if (s.contains("mutation_prob"))
            cfg.search.mutation_prob = as_double(s["mutation_prob"], "search.mutation_prob");
        if (s.contains("eta_mutation"))
            cfg.search.eta_mutation = as_double(s["eta_mutation"], "search.eta_mutation");
        if (s.contains("theoretical_ideal"))
            cfg.search.theoretical_ideal = as_bool(s["theoretical_ideal"], "search.theoretical_ideal");
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_file(path));
}

std::string serialize_model(const Classifier& c) {
    ordered_json j;
    j["version"] = 1;
    j["kind"] = model_kind_name(c.kind);
    j["train_seed"] = c.train_seed;
    j["hp"] = hp_json(c.hp);
    ordered_json layers = ordered_json::array();
    for (const auto& l : c.layers) {
        ordered_json layer;
        layer["in"] = l.weights.rows();
        layer["out"] = l.weights.cols();
        ordered_json w = ordered_json::array();
        for (double v : l.weights.data()) w.push_back(format_double_17(v));
        ordered_json b = ordered_json::array();
        for (double v : l.bias) b.push_back(format_double_17(v));
        layer["weights"] = w;
        layer["bias"] = b;
        layers.push_back(layer);
    }
    j["layers"] = layers;
    return j.dump(2) + "\n";
}

Classifier parse_model(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::artifact, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        Classifier c;
        c.kind = model_kind_from_name(as_string(require(j, "kind", "model"), "model.kind"));
        c.train_seed = as_seed(require(j, "train_seed", "model"), "model.train_seed");
        c.hp = hp_from_json(require(j, "hp", "model"), "model.hp");
        const ordered_json& layers = require(j, "layers", "model");
        if (!layers.is_array()) fail_schema("model.layers must be an array");
        for (const auto& lj : layers) {
            Layer l;
            const std::size_t rows = static_cast<std::size_t>(as_int(require(lj, "in", "layer"), "in"));
            const std::size_t cols =
                static_cast<std::size_t>(as_int(require(lj, "out", "layer"), "out"));
            l.weights = Matrix(rows, cols);
            const ordered_json& w = require(lj, "weights", "layer");
            if (!w.is_array() || w.size() != rows * cols)
                fail_schema("layer weight count mismatch");
            for (std::size_t i = 0; i < w.size(); ++i)
                l.weights.data()[i] = parse_double(as_string(w[i], "weights[]"));
            const ordered_json& b = require(lj, "bias", "layer");
            if (!b.is_array() || b.size() != cols) fail_schema("layer bias count mismatch");
            for (const auto& v : b) l.bias.push_back(parse_double(as_string(v, "bias[]")));
            c.layers.push_back(std::move(l));
        }
        if (c.layers.empty()) fail_schema("model has no layers");
        return c;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::artifact) throw;
        throw Error(ErrorKind::artifact, std::string("malformed model file: ") + e.what());
    }
}

namespace {

ordered_json mesd_json(const MesdResult& mesd, const std::map<SubgroupKey, std::string>& names) {
    auto name_of = [&](const SubgroupKey& g) {
        auto it = names.find(g);
        return it != names.end() ? it->second : std::string("?");
    };
    ordered_json j;
    j["alpha"] = mesd.alpha;
    j["tau"] = mesd.tau;
    j["mesd_cvar"] = mesd.mesd_cvar;
    j["mesd_max"] = mesd.mesd_max;
    j["mesd_var"] = mesd.mesd_var;
    j["fallback"] = mesd.fallback;
    j["degenerate"] = mesd.degenerate;
    ordered_json pairs = ordered_json::array();
    for (std::size_t i = 0; i < mesd.pairs.size(); ++i) {
        const auto& p = mesd.pairs[i];
        ordered_json pj;
        pj["group_i"] = name_of(p.group_i);
        pj["group_j"] = name_of(p.group_j);
        pj["gap"] = p.gap;
        pj["risk"] = p.risk;
        pj["weight"] = mesd.weights[i];
        pairs.push_back(pj);
    }
    j["pairs"] = pairs;
    return j;
}

}  // namespace

std::string serialize_fairness_report(const FairnessReport& report) {
    ordered_json j;
    j["auc"] = report.auc;
    j["f1"] = report.f1;
    j["dp"] = ordered_json{{"gap", report.dp.gap}, {"degenerate", report.dp.degenerate}};
    ordered_json eod;
    eod["gap"] = report.eod.gap;
    eod["degenerate"] = report.eod.degenerate;
    eod["skipped"] = report.eod.skipped;
    j["eod"] = eod;
    j["mesd"] = mesd_json(report.mesd, report.group_names);
    ordered_json groups = ordered_json::array();
    for (const auto& [key, g] : report.per_group) {
        ordered_json gj;
        gj["name"] = g.name;
        gj["count"] = g.count;
        gj["positives"] = g.positives;
        gj["predicted_positives"] = g.predicted_pos;
        gj["positive_rate"] = g.positive_rate;
        gj["tpr"] = g.tpr;
        gj["tpr_defined"] = g.tpr_defined;
        gj["fpr"] = g.fpr;
        gj["fpr_defined"] = g.fpr_defined;
        groups.push_back(gj);
    }
    j["groups"] = groups;
    j["stability_sample_size"] = report.stability_sample_size;
    j["infeasible"] = report.infeasible;
    return j.dump(2) + "\n";
}

std::string serialize_stability_table(const StabilityTable& table,
                                      const std::map<SubgroupKey, std::string>& names) {
    auto name_of = [&](const SubgroupKey& g) {
        auto it = names.find(g);
        return it != names.end() ? it->second : std::string("?");
    };
    ordered_json j;
    j["lambda"] = table.lambda;
    ordered_json labels = ordered_json::array();
    for (int y = 0; y < 2; ++y) {
        ordered_json lj;
        lj["label"] = y;
        lj["count"] = table.label_count[y];
        lj["mean"] = table.label_mean[y];
        lj["weight"] = table.label_weight[y];
        labels.push_back(lj);
    }
    j["labels"] = labels;
    ordered_json cells = ordered_json::array();
    for (const auto& [key, cell] : table.cells) {
        ordered_json cj;
        cj["group"] = name_of(key.first);
        cj["label"] = key.second;
        cj["count"] = cell.count;
        cj["raw"] = cell.raw_mean;
        cj["alpha"] = cell.alpha;
        cj["shrunk"] = cell.shrunk;
        cells.push_back(cj);
    }
    j["cells"] = cells;
    ordered_json groups = ordered_json::array();
    for (const auto& [g, score] : table.group_scores) {
        ordered_json gj;
        gj["group"] = name_of(g);
        gj["score"] = score;
        groups.push_back(gj);
    }
    j["groups"] = groups;
    return j.dump(2) + "\n";
}

std::string serialize_archive_entry(const ArchiveEntry& entry) {
    ordered_json j;
    j["generation"] = entry.generation;
    j["index"] = entry.index;
    j["genome"] = genome_json(entry.genome);
    j["objectives"] = objectives_json(entry.objectives);
    return j.dump();
}

ArchiveEntry parse_archive_entry(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::artifact, std::string("archive line is not valid JSON: ") + e.what());
    }
    try {
        ArchiveEntry entry;
        entry.generation = as_int(require(j, "generation", "archive"), "archive.generation");
        entry.index = static_cast<std::size_t>(as_int(require(j, "index", "archive"), "archive.index"));
        entry.genome = genome_from_json(require(j, "genome", "archive"), "archive.genome");
        entry.objectives =
            objectives_from_json(require(j, "objectives", "archive"), "archive.objectives");
        return entry;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::artifact) throw;
        throw Error(ErrorKind::artifact, std::string("malformed archive line: ") + e.what());
    }
}

std::string serialize_front(const std::vector<FrontMember>& front, const ScalarizedPick& pick,
                            const FairnessReport& pick_report, const std::string& model_file) {
    ordered_json j;
    j["version"] = 1;
    ordered_json members = ordered_json::array();
    for (const auto& m : front) {
        ordered_json mj;
        mj["genome"] = genome_json(m.genome);
        mj["objectives"] = objectives_json(m.objectives);
        if (std::isfinite(m.crowding))
            mj["crowding"] = m.crowding;
        else
            mj["crowding"] = nullptr;  // boundary sentinel
        members.push_back(mj);
    }
    j["front"] = members;
    ordered_json pj;
    pj["index"] = pick.index;
    pj["ideal"] = std::vector<double>(pick.ideal.begin(), pick.ideal.end());
    pj["scale"] = std::vector<double>(pick.scale.begin(), pick.scale.end());
    pj["score"] = pick.score;
    pj["genome"] = genome_json(front[pick.index].genome);
    pj["hyperparams"] = hp_json(front[pick.index].genome.to_hyperparams());
    pj["objectives"] = objectives_json(front[pick.index].objectives);
    pj["model_file"] = model_file;
    j["pick"] = pj;
    j["report"] = ordered_json::parse(serialize_fairness_report(pick_report));
    return j.dump(2) + "\n";
}

std::string mesd_pairs_csv(const MesdResult& mesd,
                           const std::map<SubgroupKey, std::string>& names) {
    auto name_of = [&](const SubgroupKey& g) {
        auto it = names.find(g);
        return it != names.end() ? it->second : std::string("?");
    };
    std::string out = "group_i,group_j,gap,risk,weight\n";
    for (std::size_t i = 0; i < mesd.pairs.size(); ++i) {
        const auto& p = mesd.pairs[i];
        out += name_of(p.group_i) + "," + name_of(p.group_j) + "," + render_number(p.gap) + "," +
               render_number(p.risk) + "," + render_number(mesd.weights[i]) + "\n";
    }
    return out;
}

std::string pareto_points_csv(const std::vector<ArchiveEntry>& archive) {
    std::string out = "generation,index,perf,out,proc\n";
    for (const auto& e : archive) {
        out += std::to_string(e.generation) + "," + std::to_string(e.index) + "," +
               render_number(e.objectives.perf) + "," + render_number(e.objectives.out) + "," +
               render_number(e.objectives.proc) + "\n";
    }
    return out;
}

std::string serialize_error(const std::string& kind, const std::string& message) {
    ordered_json j;
    j["error"] = ordered_json{{"kind", kind}, {"message", message}};
    return j.dump() + "\n";
}

}  // namespace uef
