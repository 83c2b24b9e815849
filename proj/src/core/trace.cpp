#include "cirpeak/core/trace.hpp"

#include <cmath>

#include "cirpeak/errors.hpp"

namespace cirpeak::core {

std::string_view to_string(TraceSource source) {
  return source == TraceSource::synthetic ? "synthetic" : "measured";
}

TraceSource trace_source_from(std::string_view text) {
  if (text == "synthetic") return TraceSource::synthetic;
  if (text == "measured") return TraceSource::measured;
  throw ValidationError("unknown trace source '" + std::string(text) + "'");
}

void require_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

CirTrace::CirTrace(std::vector<double> samples, double sample_rate, std::string label,
                   TraceSource source)
    : samples_(std::move(samples)), sample_rate_(sample_rate), label_(std::move(label)), source_(source) {
  if (samples_.empty()) throw ValidationError("trace has no samples");
  require_finite(samples_, "trace");
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw ValidationError("sample_rate must be positive and finite");
  }
}

}  // namespace cirpeak::core
