#include "cirpeak/eval/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <tuple>

#include "cirpeak/errors.hpp"

namespace cirpeak::eval {
namespace {

int peak_to_tap_distance(const detect::PeakCluster& d, const core::TruthCluster& t) {
  int best = std::numeric_limits<int>::max();
  for (int tap : t.tap_indices) best = std::min(best, std::abs(d.peak_index - tap));
  if (t.tap_indices.empty()) {
    best = std::min(std::abs(d.peak_index - t.start_index), std::abs(d.peak_index - t.end_index));
  }
  return best;
}

}  // namespace

DetectionMetrics match_clusters(const std::vector<detect::PeakCluster>& detected, const core::GroundTruth& truth,
                                int tol) {
  if (tol < 0) throw ValidationError("tol_samples must be non-negative");
  const auto& ts = truth.clusters;

  struct Pair {
    int distance;
    std::size_t d, t;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < detected.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto& d = detected[i];
      const auto& t = ts[j];
      if (d.start_index - tol <= t.end_index + tol && t.start_index - tol <= d.end_index + tol) {
        pairs.push_back({peak_to_tap_distance(d, t), i, j});
      }
    }
  }
  // Ties resolve by cluster position, not list position, so reordering the
  // inputs cannot change the result.
  auto key = [&](const Pair& p) {
    const auto& d = detected[p.d];
    const auto& t = ts[p.t];
    return std::make_tuple(p.distance, d.peak_index, d.start_index, d.end_index, t.start_index, t.end_index);
  };
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) { return key(a) < key(b); });

  std::vector<char> used_d(detected.size()), used_t(ts.size());
  DetectionMetrics m;
  double offset_sum = 0.0;
  for (const Pair& p : pairs) {
    if (used_d[p.d] || used_t[p.t]) continue;
    used_d[p.d] = used_t[p.t] = 1;
    ++m.true_positives;
    offset_sum += p.distance;
  }

  const int n_det = static_cast<int>(detected.size());
  const int n_truth = static_cast<int>(ts.size());
  m.false_positives = n_det - m.true_positives;
  m.false_negatives = n_truth - m.true_positives;
  m.cluster_count_delta = n_det - n_truth;
  m.mean_peak_offset_samples = m.true_positives > 0 ? offset_sum / m.true_positives : 0.0;

  if (n_det == 0 && n_truth == 0) {
    m.precision = m.recall = m.f1 = 1.0;
    return m;
  }
  m.precision = n_det > 0 ? static_cast<double>(m.true_positives) / n_det : 0.0;
  m.recall = n_truth > 0 ? static_cast<double>(m.true_positives) / n_truth : 1.0;
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

DetectionMetrics match_clusters(const detect::AnomalyReport& detected, const core::GroundTruth& truth, int tol) {
  return match_clusters(detected.clusters, truth, tol);
}

}  // namespace cirpeak::eval
