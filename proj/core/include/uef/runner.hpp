#pragma once

#include <string>
#include <vector>

#include "uef/config.hpp"

namespace uef {

// Each command writes only inside `out_dir` (created if absent) and returns
// a one-line human summary for stdout.

// Artifacts: config.json, report.json, stability.json, mesd_pairs.csv,
// model.json.
std::string run_audit(const RunConfig& cfg, const std::string& out_dir, int workers);

// Artifacts: config.json, archive.jsonl, front.json, model_<hash>.json.
std::string run_optimize(const RunConfig& cfg, const std::string& out_dir, int workers);

// Renders metric columns for one or more run directories in the requested
// format ("table", "csv" or "json") and refreshes the plot-ready exports
// (pareto_points.csv, mesd_variants.csv) inside each directory.
std::string run_report(const std::vector<std::string>& run_dirs, const std::string& format);

// Writes <name>.csv plus <name>.audit.json, a ready-to-run audit config with
// the matching schema embedded. Returns the summary line.
std::string run_synth(const SyntheticConfig& synth, rng::Seed master_seed,
                      const std::string& out_dir, const std::string& name);

}  // namespace uef
