#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cirpeak/core/trace.hpp"

namespace cirpeak::filters {

enum class FilterKind { butterworth, bessel, savgol, median };

std::string_view to_string(FilterKind kind);
FilterKind filter_kind_from(std::string_view text);

struct FilterSpec {
  FilterKind kind = FilterKind::median;
  int order = 0;                    // butterworth, bessel
  double cutoff_fraction_fs = 0.0;  // butterworth, bessel; cutoff = fraction * Fs
  int window = 0;                   // savgol, median (odd)
  int polyorder = 0;                // savgol
  bool zero_phase = true;           // butterworth, bessel
  std::string note;                 // preset provenance, e.g. window repairs
};

void validate(const FilterSpec& spec);

/// `butter-table5`, `bessel-table5`, `savgol-table5`, `median-table5`.
FilterSpec filter_preset(std::string_view name);
bool is_filter_preset(std::string_view name);
std::vector<std::string> filter_preset_names();

/// Smoothed trend of the trace, same length, in dB.
std::vector<double> filter_trend(const FilterSpec& spec, const core::CirTrace& trace);

nlohmann::json filter_spec_to_json(const FilterSpec& spec);
FilterSpec filter_spec_from_json(const nlohmann::json& j);

}  // namespace cirpeak::filters
