#include "cirpeak/core/windows.hpp"

#include <string>

#include "cirpeak/core/trace.hpp"
#include "cirpeak/errors.hpp"

namespace cirpeak::core {

WindowedDataset::WindowedDataset(std::size_t k, std::vector<double> inputs, std::vector<double> targets)
    : k_(k), inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (k_ == 0) throw ValidationError("window length must be positive");
  if (inputs_.size() != k_ * targets_.size()) throw ValidationError("window matrix shape mismatch");
  require_finite(inputs_, "window inputs");
  require_finite(targets_, "window targets");
}

WindowedDataset make_windows(std::span<const double> series, std::size_t k) {
  if (k == 0) throw ValidationError("window length must be positive");
  if (series.size() <= k) {
    throw InsufficientDataError("series of length " + std::to_string(series.size()) +
                                " leaves no target for window k=" + std::to_string(k));
  }
  const std::size_t n = series.size() - k;
  std::vector<double> inputs;
  inputs.reserve(n * k);
  std::vector<double> targets(n);
  for (std::size_t j = 0; j < n; ++j) {
    inputs.insert(inputs.end(), series.begin() + j, series.begin() + j + k);
    targets[j] = series[j + k];
  }
  return {k, std::move(inputs), std::move(targets)};
}

}  // namespace cirpeak::core
