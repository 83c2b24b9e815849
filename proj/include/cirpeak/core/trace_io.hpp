#pragma once

#include <filesystem>
#include <string>

#include "cirpeak/core/synth.hpp"
#include "cirpeak/core/trace.hpp"

namespace cirpeak::core {

/// `trace.csv` -> `trace.meta.json`
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);
/// `trace.csv` -> `trace.truth.json`
std::filesystem::path truth_path(const std::filesystem::path& csv_path);

std::string trace_to_csv(const CirTrace& trace);
std::string trace_metadata_json(const CirTrace& trace);
std::string truth_to_json(const GroundTruth& truth);

/// Parses `index,power_db` CSV. Line numbers in errors count data rows
/// (1-based, header excluded).
std::vector<double> parse_trace_csv(const std::string& text);
GroundTruth parse_truth_json(const std::string& text);

/// Reads the CSV and, when present, its metadata sidecar. Without a sidecar
/// the label is the file stem, sample_rate is 1 and source is measured.
CirTrace load_trace(const std::filesystem::path& path);
/// Writes the CSV and sidecar atomically.
void save_trace(const CirTrace& trace, const std::filesystem::path& path);

GroundTruth load_truth(const std::filesystem::path& path);
void save_truth(const GroundTruth& truth, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cirpeak::core
