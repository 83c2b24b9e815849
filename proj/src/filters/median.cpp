#include "cirpeak/filters/median.hpp"

#include <algorithm>

#include "cirpeak/errors.hpp"

namespace cirpeak::filters {

std::vector<double> apply_median(std::span<const double> series, int window) {
  if (window < 1 || window % 2 == 0) throw ValidationError("median window must be odd and positive");
  if (static_cast<std::size_t>(window) > series.size()) throw ValidationError("median window exceeds the series");

  const int n = static_cast<int>(series.size());
  const int h = window / 2;
  auto at = [&](int i) { return series[static_cast<std::size_t>(std::clamp(i, 0, n - 1))]; };

  // Sorted copy of the current window, updated by one erase and one insert
  // per step.
  std::vector<double> sorted;
  sorted.reserve(static_cast<std::size_t>(window));
  for (int j = -h; j <= h; ++j) sorted.push_back(at(j));
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = sorted[static_cast<std::size_t>(h)];
    if (i + 1 == n) break;
    const double leaving = at(i - h);
    const double entering = at(i + h + 1);
    sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), leaving));
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), entering), entering);
  }
  return out;
}

}  // namespace cirpeak::filters
