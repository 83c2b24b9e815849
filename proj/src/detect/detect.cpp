#include "cirpeak/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cirpeak/core/scaler.hpp"
#include "cirpeak/detect/dbscan.hpp"
#include "cirpeak/errors.hpp"

namespace cirpeak::detect {

ResidualSeries residual(std::span<const double> input, std::span<const double> predicted, std::size_t warmup_len) {
  if (input.size() != predicted.size()) {
    throw ValidationError("input and prediction lengths differ (" + std::to_string(input.size()) + " vs " +
                          std::to_string(predicted.size()) + ")");
  }
  if (warmup_len > input.size()) throw ValidationError("warmup longer than the series");
  ResidualSeries out;
  out.warmup_len = warmup_len;
  out.values.assign(input.size(), 0.0);
  for (std::size_t x = warmup_len; x < input.size(); ++x) out.values[x] = input[x] - predicted[x];
  core::require_finite(out.values, "residual");
  return out;
}

ResidualSeries residual(const core::CirTrace& input, std::span<const double> predicted, std::size_t warmup_len) {
  return residual(input.samples(), predicted, warmup_len);
}

void validate(const DetectConfig& cfg) {
  if (!(cfg.eps_value > 0.0)) throw ValidationError("eps_value must be positive");
  if (!(cfg.eps_index > 0.0)) throw ValidationError("eps_index must be positive");
  if (cfg.min_samples < 1) throw ValidationError("min_samples must be >= 1");
}

CandidateSet select_candidates(const ResidualSeries& res, const DetectConfig& cfg) {
  validate(cfg);
  if (res.warmup_len > res.values.size()) throw ValidationError("warmup longer than the residual");

  CandidateSet out;
  const std::span<const double> active(res.values.data() + res.warmup_len, res.values.size() - res.warmup_len);
  if (active.size() < 2) {
    out.diagnostic = "residual is entirely warmup; nothing to detect";
    return out;
  }

  std::vector<double> z;
  try {
    z = core::standardize(active).first;
  } catch (const DegenerateInputError&) {
    out.diagnostic = "residual is constant; nothing to detect";
    return out;
  }

  // Amplitude clustering, largest cluster = noise bulk.
  const std::vector<int> amp = dbscan(z, 1, cfg.eps_value, cfg.min_samples);
  std::map<int, std::size_t> sizes;
  for (int l : amp) {
    if (l != kNoise) ++sizes[l];
  }
  int bulk = kNoise;
  std::size_t bulk_size = 0;
  for (const auto& [label, size] : sizes) {
    if (size > bulk_size) {
      bulk = label;
      bulk_size = size;
    }
  }

  for (std::size_t j = 0; j < amp.size(); ++j) {
    if (bulk != kNoise && amp[j] == bulk) continue;
    const std::size_t x = j + res.warmup_len;
    if (cfg.positive_only && !(res.values[x] > 0.0)) continue;
    out.indices.push_back(x);
  }
  return out;
}

AnomalyReport detect_anomalies(const ResidualSeries& res, const DetectConfig& cfg) {
  CandidateSet selected = select_candidates(res, cfg);

  AnomalyReport report;
  report.residual = res;
  report.point_labels.assign(res.values.size(), kNoise);
  report.diagnostic = std::move(selected.diagnostic);
  if (selected.indices.empty()) return report;

  const std::vector<double> candidates(selected.indices.begin(), selected.indices.end());

  // Stage 2: group candidates along the delay axis.
  const std::vector<int> groups = dbscan(candidates, 1, cfg.eps_index, cfg.min_samples);
  std::map<int, std::vector<int>> members;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j] != kNoise) members[groups[j]].push_back(static_cast<int>(candidates[j]));
  }

  for (const auto& [label, idx] : members) {
    // Border points may be claimed by an earlier group; keep only groups
    // that still meet the density threshold.
    if (static_cast<int>(idx.size()) < cfg.min_samples) continue;
    PeakCluster c;
    c.id = static_cast<int>(report.clusters.size());
    c.start_index = *std::min_element(idx.begin(), idx.end());
    c.end_index = *std::max_element(idx.begin(), idx.end());
    c.size = static_cast<int>(idx.size());
    c.peak_index = idx.front();
    for (int x : idx) {
      report.point_labels[static_cast<std::size_t>(x)] = c.id;
      if (res.values[static_cast<std::size_t>(x)] > res.values[static_cast<std::size_t>(c.peak_index)]) {
        c.peak_index = x;
      }
    }
    c.peak_residual_db = res.values[static_cast<std::size_t>(c.peak_index)];
    report.clusters.push_back(c);
  }
  return report;
}

}  // namespace cirpeak::detect
