#pragma once

#include <vector>

#include "cirpeak/core/synth.hpp"
#include "cirpeak/detect/detect.hpp"

namespace cirpeak::eval {

struct DetectionMetrics {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int cluster_count_delta = 0;  // detected - truth
  double mean_peak_offset_samples = 0.0;
};

/// Detected and truth clusters may pair when their index ranges, each
/// widened by tol_samples on both sides, overlap. Pairs are taken greedily
/// in ascending distance from the detected peak to the nearest truth tap;
/// each cluster is used at most once.
///
/// Conventions: no detections and no truth gives P = R = F1 = 1; no
/// detections against non-empty truth gives P = R = 0; detections against
/// empty truth give P = 0 and R = 1.
DetectionMetrics match_clusters(const std::vector<detect::PeakCluster>& detected, const core::GroundTruth& truth,
                                int tol_samples);
DetectionMetrics match_clusters(const detect::AnomalyReport& detected, const core::GroundTruth& truth,
                                int tol_samples);

}  // namespace cirpeak::eval
