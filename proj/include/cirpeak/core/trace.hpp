#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cirpeak::core {

enum class TraceSource { measured, synthetic };

std::string_view to_string(TraceSource source);
TraceSource trace_source_from(std::string_view text);

/// Relative power (dB) versus delay tap. Validated on construction and
/// immutable afterwards.
class CirTrace {
 public:
  CirTrace(std::vector<double> samples, double sample_rate, std::string label,
           TraceSource source = TraceSource::measured);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double sample_rate() const noexcept { return sample_rate_; }
  const std::string& label() const noexcept { return label_; }
  TraceSource source() const noexcept { return source_; }

 private:
  std::vector<double> samples_;
  double sample_rate_;
  std::string label_;
  TraceSource source_;
};

/// Throws ValidationError if any value is NaN or infinite.
void require_finite(std::span<const double> values, std::string_view what);

}  // namespace cirpeak::core
