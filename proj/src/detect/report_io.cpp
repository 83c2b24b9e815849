#include "cirpeak/detect/report_io.hpp"

#include <json.hpp>

#include "cirpeak/errors.hpp"

namespace cirpeak::detect {
using nlohmann::json;

std::vector<std::pair<int, int>> run_length_encode(const std::vector<int>& labels) {
  std::vector<std::pair<int, int>> runs;
  for (int l : labels) {
    if (!runs.empty() && runs.back().first == l) {
      ++runs.back().second;
    } else {
      runs.emplace_back(l, 1);
    }
  }
  return runs;
}

std::vector<int> run_length_decode(const std::vector<std::pair<int, int>>& runs) {
  std::vector<int> labels;
  for (const auto& [label, run] : runs) {
    if (run < 1) throw ParseError("run length must be positive", 0);
    labels.insert(labels.end(), static_cast<std::size_t>(run), label);
  }
  return labels;
}

std::string report_to_json(const AnomalyReport& report) {
  json clusters = json::array();
  for (const auto& c : report.clusters) {
    clusters.push_back({{"id", c.id},
                        {"start", c.start_index},
                        {"end", c.end_index},
                        {"peak", c.peak_index},
                        {"peak_db", c.peak_residual_db},
                        {"size", c.size}});
  }
  json rle = json::array();
  for (const auto& [label, run] : run_length_encode(report.point_labels)) rle.push_back({label, run});
  json j = {{"warmup", report.residual.warmup_len}, {"clusters", clusters}, {"labels_rle", rle}};
  if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
  return j.dump(2) + "\n";
}

AnomalyReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    AnomalyReport r;
    r.residual.warmup_len = j.at("warmup").get<std::size_t>();
    for (const auto& c : j.at("clusters")) {
      r.clusters.push_back({c.at("id").get<int>(), c.at("start").get<int>(), c.at("end").get<int>(),
                            c.at("peak").get<int>(), c.at("peak_db").get<double>(), c.at("size").get<int>()});
    }
    std::vector<std::pair<int, int>> runs;
    for (const auto& run : j.at("labels_rle")) runs.emplace_back(run.at(0).get<int>(), run.at(1).get<int>());
    r.point_labels = run_length_decode(runs);
    r.diagnostic = j.value("diagnostic", std::string());
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("anomaly report: ") + e.what(), 0);
  }
}

}  // namespace cirpeak::detect
