#pragma once

#include <cstddef>
#include <vector>

#include "cirpeak/core/trace.hpp"
#include "cirpeak/nn/model.hpp"

namespace cirpeak::nn {

/// Predicted trace in dB. The first `warmup_len` (= k) entries have no
/// context and copy the input.
struct PredictedSeries {
  std::vector<double> values;
  std::size_t warmup_len = 0;
};

/// Standardizes with the model's scaler, predicts every next sample from the
/// preceding k and maps back to dB. Throws InsufficientDataError when the
/// trace has k samples or fewer.
PredictedSeries predict_series(const Model& model, const core::CirTrace& trace);

}  // namespace cirpeak::nn
