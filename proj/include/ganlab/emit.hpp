#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ganlab/bounds.hpp"
#include "ganlab/experiment.hpp"

namespace ganlab {

/// Provenance record for one CLI run: written with status "running" before
/// any long computation starts and finalized on completion, listing every
/// output file.
struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::uint64_t master_seed = 0;
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;  // empty while running
    std::string status = "running";
    std::vector<std::string> output_files;
    nlohmann::json effective_config;  // canonical config, defaults applied
    std::vector<std::string> notes;
};

std::string iso8601_utc_now();

/// Formats a double with 17 significant digits, '.' decimal point, no
/// thousands separators; the same bytes on every run.
std::string format_real(double v);

/// Writes gaps.csv (one row per record plus the header), refusing an empty
/// record list. Identical inputs produce byte-identical files.
void write_gaps_csv(const std::string& path, const std::string& experiment_id,
                    const std::vector<GapRecord>& records);

void write_rate_fit_json(const std::string& path, const RateFit& fit);

/// plot_data.csv columns: n, median_gap, q25, q75, predicted_gap_from_fit.
void write_plot_data_csv(const std::string& path, const RateFit& fit);

nlohmann::json bound_report_to_json(const BoundReport& report, const std::string& phi_name);
void write_bound_report_json(const std::string& path, const BoundReport& report,
                             const std::string& phi_name);

void write_manifest_json(const std::string& path, const RunManifest& manifest);

nlohmann::json gap_record_to_json(const GapRecord& r);
nlohmann::json rate_fit_to_json(const RateFit& fit);

/// Reads a gaps.csv written by write_gaps_csv back into records (for the
/// rate-fit subcommand).
std::vector<GapRecord> read_gaps_csv(const std::string& path);

}  // namespace ganlab
