#pragma once

#include <span>
#include <utility>
#include <vector>

namespace cirpeak::core {

struct ScalerParams {
  double mean = 0.0;
  double std = 1.0;
};

/// Fits mean and population standard deviation (divide by N).
/// Throws DegenerateInputError for a constant series, ValidationError for
/// fewer than two samples or non-finite values.
ScalerParams fit_scaler(std::span<const double> series);

std::vector<double> apply_scaler(std::span<const double> series, const ScalerParams& params);

std::pair<std::vector<double>, ScalerParams> standardize(std::span<const double> series);

std::vector<double> destandardize(std::span<const double> series, const ScalerParams& params);

}  // namespace cirpeak::core
