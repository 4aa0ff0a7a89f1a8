#pragma once

#include "flexquant/dataset.hpp"
#include "flexquant/diagnostics.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace flexq {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// One row per tau, one column per grid result (in the given order).
void write_counts_tsv(const std::filesystem::path& path, const std::vector<GridResult>& results);

/// A header of method names, a row of "spikes/pulses"
/// cells keyed by the grid size, and a row of wide-event counts.
void write_events_tsv(const std::filesystem::path& path, const std::vector<GridResult>& results);

void write_coefficients_tsv(const std::filesystem::path& path, const Dataset& data,
                            const std::vector<GridResult>& results);

/// Count curves as polylines plus the ideal diagonal. Plots counts only.
void write_curves_svg(const std::filesystem::path& path, const std::vector<GridResult>& results);

/// Scatter of a single-predictor dataset overlaid with every fitted line.
void write_lines_svg(const std::filesystem::path& path, const Dataset& data,
                     const GridResult& result);

struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config;
  std::vector<unsigned long long> seeds;
  nlohmann::json datasets = nlohmann::json::array();
  double wall_seconds = 0.0;
  std::string started_utc;

  nlohmann::json to_json() const;
};

nlohmann::json dataset_fingerprint(const Dataset& data, const std::string& label);
std::string utc_timestamp();
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace flexq
