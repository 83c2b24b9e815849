#include "cirpeak/core/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "cirpeak/errors.hpp"

namespace cirpeak::core {
namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int max_cluster_extent(const SynthConfig& c) {
  return (c.taps_per_cluster.max - 1) * c.tap_spacing.max + 1;
}

// Free samples kept between neighbouring slots so distinct clusters never
// touch.
constexpr int kSlotGap = 24;

}  // namespace

void validate(const SynthConfig& c) {
  if (c.n_samples < 200) throw ValidationError("n_samples must be at least 200");
  if (!std::isfinite(c.noise_floor_db)) throw ValidationError("noise_floor_db must be finite");
  if (!(c.noise_sigma_db > 0.0) || !std::isfinite(c.noise_sigma_db)) {
    throw ValidationError("noise_sigma_db must be positive");
  }
  if (c.n_clusters < 0) throw ValidationError("n_clusters must be non-negative");
  if (c.taps_per_cluster.min < 1 || c.taps_per_cluster.max < c.taps_per_cluster.min) {
    throw ValidationError("taps_per_cluster must satisfy 1 <= min <= max");
  }
  if (c.tap_spacing.min < 1 || c.tap_spacing.max < c.tap_spacing.min) {
    throw ValidationError("tap_spacing must satisfy 1 <= min <= max");
  }
  if (!(c.cluster_decay_db_per_tap > 0.0)) throw ValidationError("cluster_decay_db_per_tap must be positive");
  if (!(c.peak_snr_db.min > 0.0) || c.peak_snr_db.max < c.peak_snr_db.min) {
    throw ValidationError("peak_snr_db must satisfy 0 < min <= max");
  }
  if (c.peak_snr_db.min - c.cluster_decay_db_per_tap * (c.taps_per_cluster.max - 1) <= 0.0) {
    throw ValidationError("weakest tap would fall below the noise floor; reduce decay or taps");
  }
  if (c.guard_samples < 0 || c.guard_samples >= c.n_samples) {
    throw ValidationError("guard_samples must lie in [0, n_samples)");
  }
  if (c.n_clusters > 0) {
    const int usable = c.n_samples - c.guard_samples;
    const int slot = usable / c.n_clusters;
    if (slot < max_cluster_extent(c) + kSlotGap) {
      throw ValidationError("clusters do not fit: " + std::to_string(c.n_clusters) + " clusters of extent " +
                            std::to_string(max_cluster_extent(c)) + " in " + std::to_string(usable) +
                            " samples");
    }
  }
}

SynthConfig synth_preset(std::string_view name) {
  if (name == "demo") return SynthConfig{};
  if (name == "noise") {
    SynthConfig c;
    c.n_clusters = 0;
    return c;
  }
  throw ValidationError("unknown synthetic preset '" + std::string(name) + "'");
}

std::pair<CirTrace, GroundTruth> generate_synthetic_trace(const SynthConfig& c) {
  validate(c);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> noise(c.noise_floor_db, c.noise_sigma_db);

  std::vector<double> linear(static_cast<std::size_t>(c.n_samples));
  for (double& v : linear) v = db_to_linear(noise(rng));

  GroundTruth truth;
  if (c.n_clusters > 0) {
    const int slot = (c.n_samples - c.guard_samples) / c.n_clusters;
    std::uniform_int_distribution<int> taps_dist(c.taps_per_cluster.min, c.taps_per_cluster.max);
    std::uniform_int_distribution<int> spacing_dist(c.tap_spacing.min, c.tap_spacing.max);
    std::uniform_real_distribution<double> snr_dist(c.peak_snr_db.min, c.peak_snr_db.max);

    for (int m = 0; m < c.n_clusters; ++m) {
      const int n_taps = taps_dist(rng);
      std::vector<int> offsets{0};
      for (int t = 1; t < n_taps; ++t) offsets.push_back(offsets.back() + spacing_dist(rng));
      const int extent = offsets.back() + 1;

      const int slot_begin = c.guard_samples + m * slot + kSlotGap / 2;
      const int room = slot - kSlotGap - extent;
      std::uniform_int_distribution<int> start_dist(0, room);
      const int start = slot_begin + start_dist(rng);

      TruthCluster cluster;
      cluster.start_index = start;
      cluster.end_index = start + offsets.back();
      cluster.peak_power_db = c.noise_floor_db + snr_dist(rng);
      for (int t = 0; t < n_taps; ++t) {
        const int idx = start + offsets[static_cast<std::size_t>(t)];
        cluster.tap_indices.push_back(idx);
        linear[static_cast<std::size_t>(idx)] +=
            db_to_linear(cluster.peak_power_db - c.cluster_decay_db_per_tap * t);
      }
      truth.clusters.push_back(std::move(cluster));
    }
  }

  std::vector<double> samples(linear.size());
  for (std::size_t i = 0; i < linear.size(); ++i) samples[i] = 10.0 * std::log10(linear[i]);
  CirTrace trace(std::move(samples), 1.0, "synthetic-seed-" + std::to_string(c.seed), TraceSource::synthetic);
  return {std::move(trace), std::move(truth)};
}

}  // namespace cirpeak::core
