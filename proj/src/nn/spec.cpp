#include "cirpeak/nn/spec.hpp"

#include <array>
#include <cmath>

#include "cirpeak/errors.hpp"

namespace cirpeak::nn {

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::lstm: return "lstm";
    case LayerKind::dropout: return "dropout";
    case LayerKind::flatten: return "flatten";
    case LayerKind::repeat_vector: return "repeat_vector";
    case LayerKind::time_distributed_dense: return "time_distributed_dense";
  }
  return "?";
}

std::string_view to_string(Activation activation) {
  return activation == Activation::relu ? "relu" : "linear";
}

LayerKind layer_kind_from(std::string_view text) {
  for (LayerKind k : {LayerKind::dense, LayerKind::lstm, LayerKind::dropout, LayerKind::flatten,
                      LayerKind::repeat_vector, LayerKind::time_distributed_dense}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown layer kind '" + std::string(text) + "'");
}

Activation activation_from(std::string_view text) {
  if (text == "relu") return Activation::relu;
  if (text == "linear") return Activation::linear;
  throw ValidationError("unknown activation '" + std::string(text) + "'");
}

LayerSpec LayerSpec::dense(int width, Activation activation) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.width = width;
  s.activation = activation;
  return s;
}

LayerSpec LayerSpec::lstm(int width, bool returns_sequence, Activation activation) {
  LayerSpec s;
  s.kind = LayerKind::lstm;
  s.width = width;
  s.activation = activation;
  s.returns_sequence = returns_sequence;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

LayerSpec LayerSpec::repeat_vector(int repeat) {
  LayerSpec s;
  s.kind = LayerKind::repeat_vector;
  s.repeat = repeat;
  return s;
}

LayerSpec LayerSpec::time_distributed_dense(int width, Activation activation) {
  LayerSpec s;
  s.kind = LayerKind::time_distributed_dense;
  s.width = width;
  s.activation = activation;
  return s;
}

bool LayerSpec::has_parameters() const noexcept {
  return kind == LayerKind::dense || kind == LayerKind::lstm || kind == LayerKind::time_distributed_dense;
}

namespace {

ModelSpec fcnn(int k, double scale) {
  using L = LayerSpec;
  return {{L::dense(64), L::dropout(0.2), L::dense(32), L::dropout(0.2), L::dense(16), L::dense(32),
           L::dropout(0.2), L::dense(64), L::dropout(0.2), L::time_distributed_dense(1)},
          k,
          scale};
}

ModelSpec lstm_autoencoder(int outer, int inner, int repeat, int k, double scale) {
  using L = LayerSpec;
  return {{L::lstm(outer, true), L::dropout(0.2), L::lstm(inner, false), L::dropout(0.2), L::flatten(),
           L::repeat_vector(repeat), L::lstm(inner, true), L::dropout(0.2), L::lstm(outer, true),
           L::dropout(0.2), L::time_distributed_dense(1)},
          k,
          scale};
}

int scaled(int value, double scale, const char* what) {
  const double v = value * scale;
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 1.0) {
    throw ValidationError(std::string(what) + " " + std::to_string(value) + " scaled by " + std::to_string(scale) +
                          " is not an integer >= 1");
  }
  return static_cast<int>(r);
}

}  // namespace

ModelSpec preset_spec(std::string_view name, int input_window, double scale) {
  if (name == "table1" || name == "fcnn") return fcnn(input_window, scale);
  if (name == "table2" || name == "table3" || name == "lstm") return lstm_autoencoder(64, 32, 16, input_window, scale);
  if (name == "table4") return lstm_autoencoder(8, 4, 2, input_window, scale);
  throw ValidationError("unknown model preset '" + std::string(name) + "'");
}

std::vector<LayerSpec> effective_layers(const ModelSpec& spec) {
  constexpr std::array<double, 4> kScales{1.0, 0.5, 0.25, 0.125};
  bool scale_ok = false;
  for (double s : kScales) scale_ok = scale_ok || spec.scale == s;
  if (!scale_ok) throw ValidationError("scale must be one of 1, 1/2, 1/4, 1/8");
  if (spec.input_window < 1) throw ValidationError("input_window must be positive");
  if (spec.layers.empty()) throw ValidationError("model has no layers");

  const LayerSpec& last = spec.layers.back();
  if (last.kind != LayerKind::time_distributed_dense || last.width != 1) {
    throw ValidationError("model must end in time_distributed_dense 1");
  }

  std::vector<LayerSpec> out;
  out.reserve(spec.layers.size());
  // Shape tracking: (steps, features). Sequence input when the first layer
  // with parameters is an LSTM.
  bool sequence_input = false;
  for (const auto& l : spec.layers) {
    if (l.has_parameters()) {
      sequence_input = l.kind == LayerKind::lstm;
      break;
    }
  }
  int steps = sequence_input ? spec.input_window : 1;

  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    LayerSpec l = spec.layers[i];
    const bool is_output = i + 1 == spec.layers.size();
    switch (l.kind) {
      case LayerKind::dense:
      case LayerKind::time_distributed_dense:
      case LayerKind::lstm:
        if (l.width < 1) throw ValidationError("layer width must be >= 1");
        if (!is_output) l.width = scaled(l.width, spec.scale, "width");
        if (l.kind == LayerKind::lstm && !l.returns_sequence) steps = 1;
        break;
      case LayerKind::dropout:
        if (!(l.rate >= 0.0 && l.rate < 1.0)) throw ValidationError("dropout rate must lie in [0, 1)");
        break;
      case LayerKind::flatten:
        steps = 1;
        break;
      case LayerKind::repeat_vector:
        if (l.repeat < 1) throw ValidationError("repeat must be >= 1");
        if (steps != 1) throw ValidationError("repeat_vector needs a single-step input; insert flatten first");
        l.repeat = scaled(l.repeat, spec.scale, "repeat");
        steps = l.repeat;
        break;
    }
    out.push_back(l);
  }
  return out;
}

std::vector<int> layer_widths(const std::vector<LayerSpec>& layers) {
  std::vector<int> widths;
  for (const auto& l : layers) {
    if (l.has_parameters()) widths.push_back(l.width);
    if (l.kind == LayerKind::repeat_vector) widths.push_back(l.repeat);
  }
  return widths;
}

}  // namespace cirpeak::nn
