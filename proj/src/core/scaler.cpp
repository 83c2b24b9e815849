#include "cirpeak/core/scaler.hpp"

#include <cmath>

#include "cirpeak/core/trace.hpp"
#include "cirpeak/errors.hpp"

namespace cirpeak::core {

ScalerParams fit_scaler(std::span<const double> series) {
  if (series.size() < 2) throw ValidationError("standardize needs at least two samples");
  require_finite(series, "standardize");

  const double n = static_cast<double>(series.size());
  double sum = 0.0;
  for (double x : series) sum += x;
  const double mean = sum / n;

  // Two-pass variance with the compensation term keeps |mean| of the output
  // near machine precision even for large offsets.
  double sq = 0.0;
  double comp = 0.0;
  for (double x : series) {
    const double d = x - mean;
    sq += d * d;
    comp += d;
  }
  const double var = (sq - comp * comp / n) / n;
  if (!(var > 0.0)) throw DegenerateInputError("cannot standardize a constant series");
  return {mean + comp / n, std::sqrt(var)};
}

std::vector<double> apply_scaler(std::span<const double> series, const ScalerParams& params) {
  if (!(params.std > 0.0)) throw ValidationError("scaler std must be positive");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - params.mean) / params.std;
  return out;
}

std::pair<std::vector<double>, ScalerParams> standardize(std::span<const double> series) {
  const ScalerParams params = fit_scaler(series);
  return {apply_scaler(series, params), params};
}

std::vector<double> destandardize(std::span<const double> series, const ScalerParams& params) {
  if (!(params.std > 0.0)) throw ValidationError("scaler std must be positive");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = series[i] * params.std + params.mean;
  return out;
}

}  // namespace cirpeak::core
