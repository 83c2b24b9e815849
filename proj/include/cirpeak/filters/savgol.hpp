#pragma once

#include <span>
#include <vector>

namespace cirpeak::filters {

/// Central Savitzky-Golay smoothing kernel: the row of the least-squares
/// polynomial fit (degree polyorder over positions -h..h) that evaluates the
/// fit at 0. Requires an odd window and polyorder < window.
std::vector<double> savgol_coefficients(int window, int polyorder);

/// Correlates the series with the kernel, extending both ends by
/// half-sample reflection (x[-1] = x[0], x[-2] = x[1], ...).
std::vector<double> apply_savgol(std::span<const double> series, int window, int polyorder);

}  // namespace cirpeak::filters
