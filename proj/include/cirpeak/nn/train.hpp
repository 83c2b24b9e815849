#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cirpeak/core/trace.hpp"
#include "cirpeak/core/windows.hpp"
#include "cirpeak/nn/model.hpp"

namespace cirpeak::nn {

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool shuffle = true;
};

void validate(const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;     // mean squared error, standardized units
  double seconds = 0.0;  // wall clock
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  double total_seconds() const;
  double final_loss() const { return epochs.back().loss; }
  /// `epoch,loss,seconds`
  std::string to_csv() const;
};

struct TrainResult {
  Model model;
  TrainHistory history;
};

/// Mini-batch Adam on mean squared error. Single threaded and bit
/// reproducible for a fixed config. Throws NumericalError naming the epoch
/// and batch when the loss stops being finite.
TrainResult train(Model model, const core::WindowedDataset& dataset, const TrainConfig& cfg);

/// Fits the scaler on the trace, windows it, builds the spec with
/// cfg.seed and trains. The returned model carries the scaler.
TrainResult fit_trace(const ModelSpec& spec, const core::CirTrace& trace, const TrainConfig& cfg);

}  // namespace cirpeak::nn
