#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cirpeak/nn/model.hpp"

namespace cirpeak::nn {

enum class Mode { train, infer };

/// One matrix per time step, each features x batch.
using Sequence = std::vector<Eigen::MatrixXd>;

struct LayerCache {
  Sequence input;
  Sequence output;
  Sequence gates;  // lstm: [i; f; o; g] after their nonlinearities
  Sequence cells;  // lstm: c_t
  Sequence mask;   // dropout (empty in infer mode)
};

/// Everything backward() needs, plus enough identity to reject a cache that
/// belongs to another model or parameter state.
struct ForwardCache {
  std::vector<LayerCache> layers;
  Eigen::Index batch = 0;
  std::uint64_t digest = 0;
};

/// Runs a batch of windows (k x B, one window per column). Returns the
/// scalar prediction per column: the last output step of the final layer.
/// `rng` is required in train mode (dropout masks); `cache` is optional.
/// Throws ValidationError on a wrong window length, NumericalError when an
/// activation becomes non-finite.
Eigen::RowVectorXd forward_batch(const Model& model, const Eigen::MatrixXd& windows, Mode mode,
                                 std::mt19937_64* rng, ForwardCache* cache);

struct Prediction {
  double value = 0.0;
  ForwardCache cache;
};

Prediction forward(const Model& model, std::span<const double> window, Mode mode, std::mt19937_64& rng);

/// Reverse-mode gradients of the loss given dLoss/dPrediction per column.
/// Back-propagates through time over every encoder and decoder step.
ParamSet backward(const Model& model, const ForwardCache& cache, const Eigen::RowVectorXd& d_prediction);
ParamSet backward(const Model& model, const ForwardCache& cache, double d_prediction);

/// Sign pattern of every ReLU input recorded in the cache. Two caches with
/// equal patterns lie on the same linear piece of the network.
std::vector<bool> relu_pattern(const Model& model, const ForwardCache& cache);

}  // namespace cirpeak::nn
