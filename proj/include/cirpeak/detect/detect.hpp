#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cirpeak/core/trace.hpp"

namespace cirpeak::detect {

/// Signed input - predicted, in dB. Entries before warmup_len are 0.
struct ResidualSeries {
  std::vector<double> values;
  std::size_t warmup_len = 0;
};

/// Throws ValidationError on a length mismatch or warmup_len > length.
ResidualSeries residual(std::span<const double> input, std::span<const double> predicted, std::size_t warmup_len);
ResidualSeries residual(const core::CirTrace& input, std::span<const double> predicted, std::size_t warmup_len);

struct DetectConfig {
  double eps_value = 0.5;  // stage 1 radius, standardized residual units
  int min_samples = 2;
  double eps_index = 10.0;  // stage 2 radius, samples
  bool positive_only = true;
};

void validate(const DetectConfig& cfg);

struct PeakCluster {
  int id = 0;
  int start_index = 0;
  int end_index = 0;
  int peak_index = 0;
  double peak_residual_db = 0.0;
  int size = 0;
};

struct AnomalyReport {
  ResidualSeries residual;
  std::vector<int> point_labels;  // -1 or a cluster id, one per sample
  std::vector<PeakCluster> clusters;
  std::string diagnostic;  // set when detection was skipped
};

/// Stage-1 output: sample indices outside the noise bulk, ascending.
struct CandidateSet {
  std::vector<std::size_t> indices;
  std::string diagnostic;
};

/// Standardizes the non-warmup residual, runs 1-D DBSCAN (eps_value,
/// min_samples) and returns every point outside the largest cluster
/// (positive residuals only when positive_only).
CandidateSet select_candidates(const ResidualSeries& residual, const DetectConfig& cfg);

/// Stage 1 standardizes the non-warmup residual and runs 1-D DBSCAN
/// (eps_value, min_samples); the largest cluster is the noise bulk and every
/// other point is a candidate (positive residuals only when positive_only).
/// Stage 2 runs 1-D DBSCAN over candidate sample indices (eps_index,
/// min_samples) and keeps the resulting groups as peak clusters.
/// A residual that is all warmup or constant yields an empty report with a
/// diagnostic.
AnomalyReport detect_anomalies(const ResidualSeries& residual, const DetectConfig& cfg);

}  // namespace cirpeak::detect
