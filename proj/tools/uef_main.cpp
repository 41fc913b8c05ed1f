#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uef/runner.hpp"
#include "uef/serialize.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "run";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;  // 0 = hardware concurrency
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config) {
    auto* config = cmd->add_option("--config", flags.config_path, "run config JSON");
    if (needs_config) config->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "master seed override")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--workers", flags.workers, "max concurrent evaluations (0 = auto)")
        ->check(CLI::NonNegativeNumber);
}

uef::RunConfig load_with_overrides(const CommonFlags& flags) {
    uef::RunConfig cfg = uef::load_run_config(flags.config_path);
    if (flags.seed_set) cfg.master_seed = flags.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-fairness audits and multi-objective hyperparameter search"};
    app.require_subcommand(1);

    CommonFlags audit_flags, optimize_flags, synth_flags;
    std::vector<std::string> report_dirs;
    std::string report_format = "table";
    std::string synth_preset = "planted";
    std::string synth_name = "synthetic";
    std::size_t synth_total = 1200;
    double synth_skew = 0.7;

    CLI::App* audit = app.add_subcommand("audit", "train or load one model and write its report");
    add_common(audit, audit_flags, true);

    CLI::App* optimize = app.add_subcommand("optimize", "run the multi-objective search");
    add_common(optimize, optimize_flags, true);

    CLI::App* report = app.add_subcommand("report", "render metrics for run directories");
    report->add_option("dirs", report_dirs, "run directories")->required()->expected(-1);
    report->add_option("--format", report_format, "table | csv | json");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_flags, false);
    synth->add_option("--preset", synth_preset, "balanced | skewed | planted");
    synth->add_option("--total", synth_total, "row count");
    synth->add_option("--skew", synth_skew, "largest-group share for the skewed preset");
    synth->add_option("--name", synth_name, "output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << uef::serialize_error("config", e.what());
        return 2;
    }

    try {
        if (audit->parsed()) {
            std::cout << uef::run_audit(load_with_overrides(audit_flags), audit_flags.out_dir,
                                        audit_flags.workers)
                      << "\n";
        } else if (optimize->parsed()) {
            std::cout << uef::run_optimize(load_with_overrides(optimize_flags),
                                           optimize_flags.out_dir, optimize_flags.workers)
                      << "\n";
        } else if (report->parsed()) {
            std::cout << uef::run_report(report_dirs, report_format) << "\n";
        } else if (synth->parsed()) {
            uef::SyntheticConfig s;
            s.preset = synth_preset;
            s.total = synth_total;
            s.skew = synth_skew;
            const uef::rng::Seed master = synth_flags.seed_set ? synth_flags.seed : 42;
            std::cout << uef::run_synth(s, master, synth_flags.out_dir, synth_name) << "\n";
        }
    } catch (const uef::Error& e) {
        std::cerr << uef::serialize_error(e.kind_name(), e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << uef::serialize_error("internal", e.what());
        return 4;
    }
    return 0;
}
