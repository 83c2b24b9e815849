#pragma once

#include <span>
#include <vector>

namespace cirpeak::filters {

/// Sliding median over an odd window, edges padded by replicating the end
/// samples. Requires window <= series length.
std::vector<double> apply_median(std::span<const double> series, int window);

}  // namespace cirpeak::filters
