#include "uef/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uef/serialize.hpp"

namespace uef {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string hex16(rng::Seed v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

rng::Seed eval_seed_for(rng::Seed master, const Genome& genome) {
    return rng::derive(master, {rng::hash_str("eval"), genome.hash()});
}

// CLI convention: workers < 1 means "use every core".
int resolve_workers(int workers) {
    if (workers >= 1) return workers;
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

}  // namespace

std::string run_audit(const RunConfig& cfg, const std::string& out_dir, int workers) {
    cfg.validate();
    ensure_dir(out_dir);
    const TabularDataset ds = load_dataset(cfg.dataset, cfg.master_seed);

    PipelineConfig pipe = cfg.pipeline;
    pipe.workers = resolve_workers(workers);

    EvaluationResult ev;
    if (!cfg.model.load.empty()) {
        const Classifier model = parse_model(read_file(cfg.model.load));
        if (model.feature_count() != ds.d())
            throw Error(ErrorKind::artifact, "loaded model expects " +
                                                 std::to_string(model.feature_count()) +
                                                 " features, dataset has " + std::to_string(ds.d()));
        ev = evaluate_model(ds, model, pipe, Split::test, cfg.master_seed);
    } else {
        ev = evaluate_config(ds, cfg.model.kind, cfg.model.hp, pipe, Split::test, cfg.master_seed);
        if (ev.infeasible)
            throw TrainingError(-1, "audit model training diverged; adjust hyperparameters");
    }

    write_file(join(out_dir, "config.json"), serialize_run_config(cfg));
    write_file(join(out_dir, "report.json"), serialize_fairness_report(ev.report));
    write_file(join(out_dir, "stability.json"),
               serialize_stability_table(ev.stability, ev.report.group_names));
    write_file(join(out_dir, "mesd_pairs.csv"), mesd_pairs_csv(ev.report.mesd, ev.report.group_names));
    write_file(join(out_dir, "model.json"), serialize_model(ev.model));

    std::ostringstream ss;
    ss << "audit: auc=" << render_number(ev.report.auc) << " f1=" << render_number(ev.report.f1)
       << " dp=" << render_number(ev.report.dp.gap) << " eod=" << render_number(ev.report.eod.gap)
       << " mesd=" << render_number(ev.report.mesd.mesd_cvar)
       << " groups=" << ev.report.per_group.size() << " -> " << out_dir;
    return ss.str();
}

std::string run_optimize(const RunConfig& cfg, const std::string& out_dir, int workers) {
    cfg.validate();
    ensure_dir(out_dir);
    const TabularDataset ds = load_dataset(cfg.dataset, cfg.master_seed);

    // Search parallelism lives across individuals; each inner pipeline runs
    // single-threaded so results and CPU budget are independent of layout.
    PipelineConfig inner = cfg.pipeline;
    inner.workers = 1;
    const EvalFn eval = [&](const Genome& genome, rng::Seed seed) {
        return evaluate_config(ds, cfg.model.kind, genome.to_hyperparams(), inner, Split::val, seed)
            .objectives;
    };
    const EvolveResult evo = evolve(eval, cfg.search, cfg.master_seed, resolve_workers(workers));
    const ScalarizedPick pick = chebyshev_select(
        evo.front, std::nullopt,
        cfg.search.theoretical_ideal ? std::optional<std::array<double, 3>>({-1.0, 0.0, 0.0})
                                     : std::nullopt);

    // Re-run the chosen genome with its archive seed to recover the model and
    // the full report; determinism makes this bit-identical to the search's
    // own evaluation.
    const Genome& chosen = evo.front[pick.index].genome;
    PipelineConfig outer = cfg.pipeline;
    outer.workers = resolve_workers(workers);
    const EvaluationResult ev = evaluate_config(ds, cfg.model.kind, chosen.to_hyperparams(), outer,
                                                Split::val, eval_seed_for(cfg.master_seed, chosen));
    if (!(ev.objectives == evo.front[pick.index].objectives))
        throw Error(ErrorKind::contract, "chosen genome re-evaluation diverged from the archive");

    write_file(join(out_dir, "config.json"), serialize_run_config(cfg));
    std::string archive_text;
    for (const auto& e : evo.archive) archive_text += serialize_archive_entry(e) + "\n";
    write_file(join(out_dir, "archive.jsonl"), archive_text);
    const std::string model_file = "model_" + hex16(chosen.hash()) + ".json";
    write_file(join(out_dir, "front.json"),
               serialize_front(evo.front, pick, ev.report, model_file));
    write_file(join(out_dir, model_file), serialize_model(ev.model));

    const HyperParams hp = chosen.to_hyperparams();
    std::ostringstream ss;
    ss << "pick: threshold=" << render_number(hp.threshold) << " l2=" << render_number(hp.l2)
       << " lr=" << render_number(hp.learning_rate) << " epochs=" << hp.epochs
       << " dropout=" << render_number(hp.dropout) << " | perf=" << render_number(ev.objectives.perf)
       << " out=" << render_number(ev.objectives.out) << " proc=" << render_number(ev.objectives.proc)
       << " | front=" << evo.front.size() << " -> " << out_dir;
    return ss.str();
}

namespace {

struct RunMetrics {
    std::string run;
    double auc = 0.0, f1 = 0.0, dp = 0.0, eod = 0.0, mesd = 0.0;
};

ordered_json load_json_artifact(const std::string& path) {
    if (!fs::exists(path)) throw Error(ErrorKind::artifact, "missing artifact: " + path);
    try {
        return ordered_json::parse(read_file(path));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::artifact, "malformed artifact " + path + ": " + e.what());
    }
}

double metric(const ordered_json& j, std::initializer_list<const char*> path,
              const std::string& where) {
    const ordered_json* cur = &j;
    for (const char* key : path) {
        if (!cur->is_object() || !cur->contains(key))
            throw Error(ErrorKind::artifact, where + " lacks \"" + key + "\"");
        cur = &(*cur)[key];
    }
    if (!cur->is_number()) throw Error(ErrorKind::artifact, where + " metric is not numeric");
    return cur->get<double>();
}

RunMetrics metrics_for(const std::string& dir) {
    RunMetrics m;
    m.run = fs::path(dir).filename().string();
    if (m.run.empty()) m.run = dir;
    ordered_json report;
    if (fs::exists(join(dir, "front.json"))) {
        const ordered_json front = load_json_artifact(join(dir, "front.json"));
        if (!front.contains("report"))
            throw Error(ErrorKind::artifact, dir + "/front.json lacks the pick report");
        report = front["report"];
    } else if (fs::exists(join(dir, "report.json"))) {
        report = load_json_artifact(join(dir, "report.json"));
    } else {
        throw Error(ErrorKind::artifact, dir + " contains neither front.json nor report.json");
    }
    m.auc = metric(report, {"auc"}, dir);
    m.f1 = metric(report, {"f1"}, dir);
    m.dp = metric(report, {"dp", "gap"}, dir);
    m.eod = metric(report, {"eod", "gap"}, dir);
    m.mesd = metric(report, {"mesd", "mesd_cvar"}, dir);

    // Plot-ready exports refreshed in place.
    if (fs::exists(join(dir, "archive.jsonl"))) {
        std::istringstream lines(read_file(join(dir, "archive.jsonl")));
        std::vector<ArchiveEntry> archive;
        std::string line;
        while (std::getline(lines, line))
            if (!line.empty()) archive.push_back(parse_archive_entry(line));
        write_file(join(dir, "pareto_points.csv"), pareto_points_csv(archive));
    }
    const ordered_json& mesd = report["mesd"];
    std::string bars = "run,mesd_cvar,mesd_max,mesd_var\n";
    bars += m.run + "," + render_number(metric(mesd, {"mesd_cvar"}, dir)) + "," +
            render_number(metric(mesd, {"mesd_max"}, dir)) + "," +
            render_number(metric(mesd, {"mesd_var"}, dir)) + "\n";
    write_file(join(dir, "mesd_variants.csv"), bars);
    return m;
}

}  // namespace

std::string run_report(const std::vector<std::string>& run_dirs, const std::string& format) {
    if (run_dirs.empty()) throw Error(ErrorKind::config, "report needs at least one run directory");
    if (format != "table" && format != "csv" && format != "json")
        throw Error(ErrorKind::config, "unknown report format: " + format);
    std::vector<RunMetrics> rows;
    for (const auto& dir : run_dirs) rows.push_back(metrics_for(dir));

    if (format == "json") {
        ordered_json runs = ordered_json::array();
        for (const auto& m : rows) {
            ordered_json r;
            r["run"] = m.run;
            r["auc"] = m.auc;
            r["f1"] = m.f1;
            r["dp_gap"] = m.dp;
            r["eod_gap"] = m.eod;
            r["mesd_cvar"] = m.mesd;
            runs.push_back(r);
        }
        return runs.dump(2);
    }
    if (format == "csv") {
        std::string out = "run,auc,f1,dp_gap,eod_gap,mesd_cvar";
        for (const auto& m : rows)
            out += "\n" + m.run + "," + render_number(m.auc) + "," + render_number(m.f1) + "," +
                   render_number(m.dp) + "," + render_number(m.eod) + "," + render_number(m.mesd);
        return out;
    }

    // table
    const std::vector<std::string> headers{"run", "auc", "f1", "dp_gap", "eod_gap", "mesd_cvar"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& m : rows)
        cells.push_back({m.run, render_number(m.auc), render_number(m.f1), render_number(m.dp),
                         render_number(m.eod), render_number(m.mesd)});
    std::vector<std::size_t> width(headers.size());
    for (std::size_t c = 0; c < headers.size(); ++c) {
        width[c] = headers[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    std::string out;
    for (std::size_t c = 0; c < headers.size(); ++c)
        out += (c ? "  " : "") + pad(headers[c], width[c]);
    for (const auto& row : cells) {
        out += "\n";
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "  " : "") + pad(row[c], width[c]);
    }
    return out;
}

std::string run_synth(const SyntheticConfig& synth, rng::Seed master_seed,
                      const std::string& out_dir, const std::string& name) {
    synth.validate();
    ensure_dir(out_dir);
    DatasetConfig dcfg;
    dcfg.synthetic = synth;
    const TabularDataset ds = load_dataset(dcfg, master_seed);

    write_file(join(out_dir, name + ".csv"), synthetic_to_csv(ds));

    // A ready-to-run audit config. The CSV path includes the output
    // directory so the config resolves from wherever synth was invoked.
    RunConfig audit_cfg;
    audit_cfg.dataset.csv = join(out_dir, name + ".csv");
    audit_cfg.dataset.schema.label_column = ds.schema.label_column;
    audit_cfg.dataset.schema.protected_columns = ds.schema.protected_columns;
    audit_cfg.master_seed = master_seed;
    write_file(join(out_dir, name + ".audit.json"), serialize_run_config(audit_cfg));

    const Census census = subgroup_census(ds);
    std::ostringstream ss;
    ss << "synth: rows=" << ds.n() << " features=" << ds.d() << " groups=" << census.size()
       << " -> " << join(out_dir, name + ".csv");
    return ss.str();
}

}  // namespace uef
