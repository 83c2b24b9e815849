#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cirpeak/detect/detect.hpp"

namespace cirpeak::detect {

/// Run-length encoding as (label, run) pairs.
std::vector<std::pair<int, int>> run_length_encode(const std::vector<int>& labels);
std::vector<int> run_length_decode(const std::vector<std::pair<int, int>>& runs);

/// `{warmup, clusters: [{id, start, end, peak, peak_db, size}], labels_rle}`
std::string report_to_json(const AnomalyReport& report);

/// Restores warmup, clusters and labels; the residual values are not part
/// of the file and come back empty.
AnomalyReport report_from_json(const std::string& text);

}  // namespace cirpeak::detect
