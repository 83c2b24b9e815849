#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cirpeak/core/scaler.hpp"
#include "cirpeak/nn/spec.hpp"

namespace cirpeak::nn {

/// Weights of one layer. Dense: W (out x in), b (out). LSTM: W (4H x in),
/// U (4H x H), b (4H) with gate blocks stacked in the order i, f, o, g.
/// Parameterless layers leave every tensor empty.
struct LayerParams {
  Eigen::MatrixXd W;
  Eigen::MatrixXd U;
  Eigen::VectorXd b;
};

/// Same layout as the model parameters; used for gradients and optimizer
/// moments.
using ParamSet = std::vector<LayerParams>;

struct Shape {
  int steps = 0;
  int features = 0;
};

struct Model {
  ModelSpec spec;
  std::vector<LayerSpec> layers;    // effective (scaled) layers
  std::vector<Shape> input_shapes;  // per-layer input shape for a single sample
  ParamSet params;
  core::ScalerParams scaler;
  // True when the window enters as k steps of one feature (LSTM stacks),
  // false when it enters as one flat k-vector (FCNN).
  bool sequence_input = false;
};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))) drawn from a
/// generator seeded with `seed`; LSTM forget-gate biases start at 1, every
/// other bias at 0.
Model build_model(const ModelSpec& spec, std::uint64_t seed);

/// Zero tensors shaped like `params`.
ParamSet zeros_like(const ParamSet& params);

std::size_t parameter_count(const ParamSet& params);

/// Visits every scalar parameter in a fixed order (layer, W, U, b;
/// column-major within a matrix).
template <typename Fn>
void for_each_scalar(ParamSet& params, Fn&& fn) {
  for (auto& layer : params) {
    for (Eigen::Index i = 0; i < layer.W.size(); ++i) fn(layer.W.data()[i]);
    for (Eigen::Index i = 0; i < layer.U.size(); ++i) fn(layer.U.data()[i]);
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) fn(layer.b.data()[i]);
  }
}

/// Order-sensitive digest of all parameter values.
std::uint64_t parameter_digest(const ParamSet& params);

}  // namespace cirpeak::nn
