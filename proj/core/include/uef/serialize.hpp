#pragma once

#include <string>
#include <vector>

#include "uef/config.hpp"
#include "uef/objectives.hpp"
#include "uef/optimize.hpp"

namespace uef {

// All artifact text goes through this one number renderer so JSON, CSV and
// table output carry byte-identical numerals.
std::string render_number(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Resolved run config, defaults materialized, canonical key order. Output
// directory and worker count are deliberately not part of the document: a
// rerun of the same config must stay byte-identical wherever and however
// parallel it runs.
std::string serialize_run_config(const RunConfig& cfg);
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Model weights round-trip exactly (17-significant-digit rendering).
std::string serialize_model(const Classifier& c);
Classifier parse_model(const std::string& json_text);

std::string serialize_fairness_report(const FairnessReport& report);
std::string serialize_stability_table(const StabilityTable& table,
                                      const std::map<SubgroupKey, std::string>& names);

// One archive.jsonl line, no trailing newline.
std::string serialize_archive_entry(const ArchiveEntry& entry);
ArchiveEntry parse_archive_entry(const std::string& line);

std::string serialize_front(const std::vector<FrontMember>& front, const ScalarizedPick& pick,
                            const FairnessReport& pick_report, const std::string& model_file);

// CSV exports consumed by plotting tools.
std::string mesd_pairs_csv(const MesdResult& mesd,
                           const std::map<SubgroupKey, std::string>& names);
std::string pareto_points_csv(const std::vector<ArchiveEntry>& archive);

// Machine-readable error envelope printed on stderr by the CLI.
std::string serialize_error(const std::string& kind, const std::string& message);

}  // namespace uef
