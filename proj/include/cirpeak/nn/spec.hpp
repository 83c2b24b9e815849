#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cirpeak::nn {

enum class LayerKind { dense, lstm, dropout, flatten, repeat_vector, time_distributed_dense };
enum class Activation { relu, linear };

std::string_view to_string(LayerKind kind);
std::string_view to_string(Activation activation);
LayerKind layer_kind_from(std::string_view text);
Activation activation_from(std::string_view text);

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  int width = 0;
  double rate = 0.0;
  int repeat = 0;
  Activation activation = Activation::linear;
  bool returns_sequence = false;

  static LayerSpec dense(int width, Activation activation = Activation::relu);
  static LayerSpec lstm(int width, bool returns_sequence, Activation activation = Activation::relu);
  static LayerSpec dropout(double rate);
  static LayerSpec flatten();
  static LayerSpec repeat_vector(int repeat);
  static LayerSpec time_distributed_dense(int width, Activation activation = Activation::linear);

  bool has_parameters() const noexcept;
  bool operator==(const LayerSpec&) const = default;
};

/// Layer list as written (unscaled) plus the window length and the width
/// scale applied at build time. The final time_distributed_dense 1 is never
/// scaled.
struct ModelSpec {
  std::vector<LayerSpec> layers;
  int input_window = 100;
  double scale = 1.0;
};

/// Presets: "table1" (FCNN), "table2"/"table3" (LSTM 64/32 - repeat 16 -
/// 32/64), "table4" (LSTM 8/4 - repeat 2 - 4/8). Aliases "fcnn" and "lstm"
/// map to table1 and table2.
ModelSpec preset_spec(std::string_view name, int input_window = 100, double scale = 1.0);

/// Validates the spec and returns the layers with `scale` applied.
/// Throws ValidationError for an unsupported scale, a non-integer or
/// sub-unit scaled width/repeat, or a malformed layer stack.
std::vector<LayerSpec> effective_layers(const ModelSpec& spec);

/// Widths of the parameterised and repeat layers, in order, e.g.
/// [64, 32, 16, 32, 64, 1] for table2.
std::vector<int> layer_widths(const std::vector<LayerSpec>& layers);

}  // namespace cirpeak::nn
