#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rramprog/config.hpp"

namespace rramprog {

// Locale-independent fixed notation.
std::string format_fixed(double value, int decimals);

// FNV-1a of the canonical config text, as 16 hex digits. Thread count and
// output directory are left out.
std::string config_fingerprint(const RunConfig &config);

// Writes to a sibling temp file then renames it over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

// One row per trace record of every run.
std::string traces_csv(const ExperimentReport &report, const RunConfig &config);

// Conductance per checkpoint and final erase width, by policy and state.
std::string histograms_csv(const ExperimentReport &report, const RunConfig &config);

// Serialized JSON documents.
std::string report_json(const ExperimentReport &report, const RunConfig &config);
// Key to canonical value, as written into every report.
std::string config_echo_json(const RunConfig &config);
std::string error_json(const std::string &code, const std::string &message);

} // namespace rramprog
