#include "cirpeak/nn/predict.hpp"

#include <algorithm>

#include "cirpeak/core/scaler.hpp"
#include "cirpeak/errors.hpp"
#include "cirpeak/nn/network.hpp"

namespace cirpeak::nn {

PredictedSeries predict_series(const Model& model, const core::CirTrace& trace) {
  const std::size_t k = static_cast<std::size_t>(model.spec.input_window);
  const std::size_t n = trace.size();
  if (n <= k) throw InsufficientDataError("trace must be longer than the model window");

  const std::vector<double> z = core::apply_scaler(trace.samples(), model.scaler);
  std::vector<double> standardized_pred(n - k);

  constexpr std::size_t kBatch = 256;
  const Eigen::Index kk = static_cast<Eigen::Index>(k);
  for (std::size_t begin = 0; begin < n - k; begin += kBatch) {
    const std::size_t end = std::min(n - k, begin + kBatch);
    Eigen::MatrixXd windows(kk, static_cast<Eigen::Index>(end - begin));
    for (std::size_t j = begin; j < end; ++j) {
      windows.col(static_cast<Eigen::Index>(j - begin)) = Eigen::Map<const Eigen::VectorXd>(z.data() + j, kk);
    }
    const Eigen::RowVectorXd pred = forward_batch(model, windows, Mode::infer, nullptr, nullptr);
    for (std::size_t j = begin; j < end; ++j) standardized_pred[j] = pred(static_cast<Eigen::Index>(j - begin));
  }

  PredictedSeries out;
  out.warmup_len = k;
  out.values.assign(trace.samples().begin(), trace.samples().begin() + static_cast<std::ptrdiff_t>(k));
  const auto db = core::destandardize(standardized_pred, model.scaler);
  out.values.insert(out.values.end(), db.begin(), db.end());
  return out;
}

}  // namespace cirpeak::nn
