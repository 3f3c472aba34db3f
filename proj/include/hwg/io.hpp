#pragma once

#include <string>

#include <json.hpp>

#include "hwg/benchmark.hpp"
#include "hwg/compositional.hpp"

namespace hwg {

nlohmann::json read_json(const std::string& path);
// Writes to a temp file in the same directory and renames into place.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

// Serialized indices are 1-based throughout.
nlohmann::json hubset_to_json(const HubSet& h);
HubSet hubset_from_json(const nlohmann::json& j);

nlohmann::json fit_summary_json(const FitResult& fit);
nlohmann::json selection_report_json(const SelectionReport& report);
void write_selection_path_csv(const std::string& path, const SelectionReport& report);

// i, j (1-based, i<j), value; optional label columns and a reproducibility
// column from a stability run.
void write_edge_list_tsv(const std::string& path, const SymMatrix& theta,
                         const std::vector<std::string>& labels = {},
                         const SymMatrix* reproducibility = nullptr);

nlohmann::json stability_json(const StabilityResult& s,
                              const std::vector<std::string>& labels = {});
nlohmann::json permtest_json(const PermTestResult& r,
                             const std::vector<std::string>& labels = {});

// Publication-style table: one row per method, mean and se columns per
// measure.
void write_aggregate_csv(const std::string& path, const ExperimentResult& result);
void write_replicate_log_csv(const std::string& path, const ExperimentResult& result);
void write_rate_csv(const std::string& path, const std::vector<RatePoint>& points);

}  // namespace hwg
