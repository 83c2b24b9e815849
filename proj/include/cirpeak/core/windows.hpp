#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cirpeak::core {

/// Sliding-window training pairs: row j holds series[j .. j+k-1] and its
/// target is series[j+k]. Rows are stored contiguously (row-major).
class WindowedDataset {
 public:
  WindowedDataset(std::size_t k, std::vector<double> inputs, std::vector<double> targets);

  std::size_t k() const noexcept { return k_; }
  std::size_t rows() const noexcept { return targets_.size(); }
  std::span<const double> row(std::size_t j) const { return {inputs_.data() + j * k_, k_}; }
  std::span<const double> targets() const noexcept { return targets_; }
  double target(std::size_t j) const { return targets_[j]; }
  /// Index in the source series of targets()[0].
  std::size_t origin_offset() const noexcept { return k_; }

 private:
  std::size_t k_;
  std::vector<double> inputs_;
  std::vector<double> targets_;
};

/// Throws InsufficientDataError when series.size() <= k.
WindowedDataset make_windows(std::span<const double> series, std::size_t k);

}  // namespace cirpeak::core
