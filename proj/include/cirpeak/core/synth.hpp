#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "cirpeak/core/trace.hpp"

namespace cirpeak::core {

struct TruthCluster {
  int start_index = 0;
  int end_index = 0;
  std::vector<int> tap_indices;
  double peak_power_db = 0.0;
};

/// Injected reflector groups, disjoint and sorted by start_index.
struct GroundTruth {
  std::vector<TruthCluster> clusters;
};

template <typename T>
struct Range {
  T min;
  T max;
};

struct SynthConfig {
  int n_samples = 2000;
  double noise_floor_db = 0.0;
  double noise_sigma_db = 1.5;
  int n_clusters = 4;
  Range<int> taps_per_cluster{3, 6};
  double cluster_decay_db_per_tap = 2.5;
  Range<double> peak_snr_db{15.0, 25.0};
  std::uint64_t seed = 7;
  // Clusters are placed at or after this index so the predictor's warmup
  // prefix stays free of reflections.
  int guard_samples = 100;
  Range<int> tap_spacing{1, 3};
};

/// Throws ValidationError when the configuration cannot be honored.
void validate(const SynthConfig& config);

/// Named configurations; "demo" is the 2000-sample, four-cluster trace
/// used throughout the tests and README.
SynthConfig synth_preset(std::string_view name);

/// Gaussian dB noise floor with decaying tap groups added in linear power.
/// Pure function of the config.
std::pair<CirTrace, GroundTruth> generate_synthetic_trace(const SynthConfig& config);

}  // namespace cirpeak::core
