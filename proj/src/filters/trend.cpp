#include "cirpeak/filters/trend.hpp"

#include "cirpeak/errors.hpp"
#include "cirpeak/filters/iir.hpp"
#include "cirpeak/filters/median.hpp"
#include "cirpeak/filters/savgol.hpp"

namespace cirpeak::filters {

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::butterworth: return "butterworth";
    case FilterKind::bessel: return "bessel";
    case FilterKind::savgol: return "savgol";
    case FilterKind::median: return "median";
  }
  return "?";
}

FilterKind filter_kind_from(std::string_view text) {
  for (FilterKind k : {FilterKind::butterworth, FilterKind::bessel, FilterKind::savgol, FilterKind::median}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown filter kind '" + std::string(text) + "'");
}

void validate(const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterKind::butterworth:
    case FilterKind::bessel:
      if (spec.order < 1) throw ValidationError("filter order must be >= 1");
      if (spec.kind == FilterKind::bessel && spec.order > 25) throw ValidationError("Bessel order must be <= 25");
      if (!(spec.cutoff_fraction_fs > 0.0 && spec.cutoff_fraction_fs < 0.5)) {
        throw ValidationError("cutoff_fraction_fs must lie in (0, 0.5)");
      }
      break;
    case FilterKind::savgol:
      if (spec.polyorder < 0 || spec.polyorder >= spec.window) {
        throw ValidationError("savgol polyorder must satisfy 0 <= polyorder < window");
      }
      [[fallthrough]];
    case FilterKind::median:
      if (spec.window < 1 || spec.window % 2 == 0) throw ValidationError("window must be odd and positive");
      break;
  }
}

FilterSpec filter_preset(std::string_view name) {
  FilterSpec s;
  if (name == "butter-table5") {
    s.kind = FilterKind::butterworth;
    s.order = 10;
    s.cutoff_fraction_fs = 0.04;
  } else if (name == "bessel-table5") {
    s.kind = FilterKind::bessel;
    s.order = 4;
    s.cutoff_fraction_fs = 0.1;
  } else if (name == "savgol-table5") {
    s.kind = FilterKind::savgol;
    s.window = 101;
    s.polyorder = 5;
    s.note = "window 100 repaired to 101 (symmetric kernel needs odd length)";
  } else if (name == "median-table5") {
    s.kind = FilterKind::median;
    s.window = 101;
    s.note = "window 100 repaired to 101 (median needs odd length)";
  } else {
    throw ValidationError("unknown filter preset '" + std::string(name) + "'");
  }
  return s;
}

std::vector<std::string> filter_preset_names() {
  return {"butter-table5", "bessel-table5", "savgol-table5", "median-table5"};
}

bool is_filter_preset(std::string_view name) {
  for (const auto& n : filter_preset_names()) {
    if (n == name) return true;
  }
  return false;
}

std::vector<double> filter_trend(const FilterSpec& spec, const core::CirTrace& trace) {
  validate(spec);
  const auto x = trace.samples();
  switch (spec.kind) {
    case FilterKind::savgol:
      return apply_savgol(x, spec.window, spec.polyorder);
    case FilterKind::median:
      return apply_median(x, spec.window);
    case FilterKind::butterworth:
    case FilterKind::bessel: {
      const IirCoefficients c = spec.kind == FilterKind::butterworth
                                    ? design_butterworth(spec.order, spec.cutoff_fraction_fs)
                                    : design_bessel(spec.order, spec.cutoff_fraction_fs);
      return spec.zero_phase ? apply_iir_zero_phase(c, x) : apply_iir_causal(c, x);
    }
  }
  throw ValidationError("unhandled filter kind");
}

nlohmann::json filter_spec_to_json(const FilterSpec& spec) {
  nlohmann::json j = {{"kind", std::string(to_string(spec.kind))}};
  switch (spec.kind) {
    case FilterKind::butterworth:
    case FilterKind::bessel:
      j["order"] = spec.order;
      j["cutoff_fraction_fs"] = spec.cutoff_fraction_fs;
      j["zero_phase"] = spec.zero_phase;
      break;
    case FilterKind::savgol:
      j["window"] = spec.window;
      j["polyorder"] = spec.polyorder;
      break;
    case FilterKind::median:
      j["window"] = spec.window;
      break;
  }
  if (!spec.note.empty()) j["note"] = spec.note;
  return j;
}

FilterSpec filter_spec_from_json(const nlohmann::json& j) {
  FilterSpec s;
  try {
    s.kind = filter_kind_from(j.at("kind").get<std::string>());
    s.order = j.value("order", 0);
    s.cutoff_fraction_fs = j.value("cutoff_fraction_fs", 0.0);
    s.window = j.value("window", 0);
    s.polyorder = j.value("polyorder", 0);
    s.zero_phase = j.value("zero_phase", true);
    s.note = j.value("note", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("filter spec: ") + e.what());
  }
  validate(s);
  return s;
}

}  // namespace cirpeak::filters
