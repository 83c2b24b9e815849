#include "cirpeak/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "cirpeak/errors.hpp"

namespace cirpeak::nn {
namespace {

void glorot_fill(Eigen::MatrixXd& m, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

}  // namespace

Model build_model(const ModelSpec& spec, std::uint64_t seed) {
  Model model;
  model.spec = spec;
  model.layers = effective_layers(spec);

  std::mt19937_64 rng(seed);
  bool sequence = false;
  for (const auto& l : model.layers) {
    if (l.has_parameters()) {
      sequence = l.kind == LayerKind::lstm;
      break;
    }
  }
  model.sequence_input = sequence;
  Shape shape = sequence ? Shape{spec.input_window, 1} : Shape{1, spec.input_window};

  for (const auto& l : model.layers) {
    model.input_shapes.push_back(shape);
    LayerParams p;
    switch (l.kind) {
      case LayerKind::dense:
      case LayerKind::time_distributed_dense:
        p.W.resize(l.width, shape.features);
        glorot_fill(p.W, shape.features, l.width, rng);
        p.b = Eigen::VectorXd::Zero(l.width);
        shape.features = l.width;
        break;
      case LayerKind::lstm: {
        const int h = l.width;
        // Glorot bounds use the stacked 4H output dimension, as the usual
        // framework initializers do.
        p.W.resize(4 * h, shape.features);
        glorot_fill(p.W, shape.features, 4 * h, rng);
        p.U.resize(4 * h, h);
        glorot_fill(p.U, h, 4 * h, rng);
        p.b = Eigen::VectorXd::Zero(4 * h);
        p.b.segment(h, h).setOnes();
        shape.features = h;
        if (!l.returns_sequence) shape.steps = 1;
        break;
      }
      case LayerKind::dropout:
        break;
      case LayerKind::flatten:
        shape = {1, shape.steps * shape.features};
        break;
      case LayerKind::repeat_vector:
        shape.steps = l.repeat;
        break;
    }
    model.params.push_back(std::move(p));
  }
  return model;
}

ParamSet zeros_like(const ParamSet& params) {
  ParamSet out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i].W = Eigen::MatrixXd::Zero(params[i].W.rows(), params[i].W.cols());
    out[i].U = Eigen::MatrixXd::Zero(params[i].U.rows(), params[i].U.cols());
    out[i].b = Eigen::VectorXd::Zero(params[i].b.size());
  }
  return out;
}

std::size_t parameter_count(const ParamSet& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.W.size() + p.U.size() + p.b.size());
  return n;
}

std::uint64_t parameter_digest(const ParamSet& params) {
  // FNV-1a over 64-bit words of the raw values.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const double* data, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint64_t word;
      std::memcpy(&word, data + i, sizeof word);
      h = (h ^ word) * 1099511628211ULL;
    }
    h = (h ^ static_cast<std::uint64_t>(n)) * 1099511628211ULL;
  };
  for (const auto& p : params) {
    mix(p.W.data(), p.W.size());
    mix(p.U.data(), p.U.size());
    mix(p.b.data(), p.b.size());
  }
  return h;
}

}  // namespace cirpeak::nn
