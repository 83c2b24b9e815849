#include "cirpeak/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cirpeak/core/scaler.hpp"
#include "cirpeak/errors.hpp"
#include "cirpeak/nn/network.hpp"

namespace cirpeak::nn {
namespace {

class Adam {
 public:
  Adam(const ParamSet& like, const TrainConfig& cfg) : m_(zeros_like(like)), v_(zeros_like(like)), cfg_(cfg) {}

  void step(ParamSet& params, ParamSet& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, t_);
    for (std::size_t l = 0; l < params.size(); ++l) {
      update(params[l].W, grads[l].W, m_[l].W, v_[l].W, c1, c2);
      update(params[l].U, grads[l].U, m_[l].U, v_[l].U, c1, c2);
      update(params[l].b, grads[l].b, m_[l].b, v_[l].b, c1, c2);
    }
  }

 private:
  template <typename T>
  void update(T& p, const T& g, T& m, T& v, double c1, double c2) const {
    if (p.size() == 0) return;
    m = cfg_.adam_beta1 * m + (1.0 - cfg_.adam_beta1) * g;
    v = cfg_.adam_beta2 * v + (1.0 - cfg_.adam_beta2) * g.cwiseProduct(g);
    p.array() -= cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.adam_epsilon);
  }

  ParamSet m_, v_;
  const TrainConfig& cfg_;
  int t_ = 0;
};

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0 && cfg.learning_rate < 1.0)) throw ValidationError("learning_rate must lie in (0, 1)");
  if (!(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0) || !(cfg.adam_beta2 >= 0.0 && cfg.adam_beta2 < 1.0)) {
    throw ValidationError("adam betas must lie in [0, 1)");
  }
  if (!(cfg.adam_epsilon > 0.0)) throw ValidationError("adam_epsilon must be positive");
}

double TrainHistory::total_seconds() const {
  double s = 0.0;
  for (const auto& e : epochs) s += e.seconds;
  return s;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loss,seconds\n";
  for (const auto& e : epochs) out << e.epoch << ',' << e.loss << ',' << e.seconds << '\n';
  return out.str();
}

TrainResult train(Model model, const core::WindowedDataset& dataset, const TrainConfig& cfg) {
  validate(cfg);
  if (dataset.rows() == 0) throw ValidationError("empty training set");
  if (dataset.k() != static_cast<std::size_t>(model.spec.input_window)) {
    throw ValidationError("dataset window k does not match the model input_window");
  }

  std::mt19937_64 rng(cfg.seed);
  Adam adam(model.params, cfg);
  const std::size_t n = dataset.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(dataset.k());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  ForwardCache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);

    double sse = 0.0;
    int batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(cfg.batch_size));
      const Eigen::Index b = static_cast<Eigen::Index>(end - begin);
      Eigen::MatrixXd windows(k, b);
      Eigen::RowVectorXd targets(b);
      for (Eigen::Index j = 0; j < b; ++j) {
        const std::size_t row = order[begin + static_cast<std::size_t>(j)];
        const auto w = dataset.row(row);
        windows.col(j) = Eigen::Map<const Eigen::VectorXd>(w.data(), k);
        targets(j) = dataset.target(row);
      }

      Eigen::RowVectorXd pred;
      try {
        pred = forward_batch(model, windows, Mode::train, &rng, &cache);
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch + 1) + ", batch " + std::to_string(batch_index) + ": " +
                             e.what());
      }
      const Eigen::RowVectorXd err = pred - targets;
      const double batch_sse = err.squaredNorm();
      if (!std::isfinite(batch_sse)) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                             std::to_string(batch_index));
      }
      sse += batch_sse;

      ParamSet grads = backward(model, cache, Eigen::RowVectorXd((2.0 / static_cast<double>(b)) * err));
      adam.step(model.params, grads);
    }

    const auto t1 = std::chrono::steady_clock::now();
    history.epochs.push_back(
        {epoch + 1, sse / static_cast<double>(n), std::chrono::duration<double>(t1 - t0).count()});
  }
  return {std::move(model), std::move(history)};
}

TrainResult fit_trace(const ModelSpec& spec, const core::CirTrace& trace, const TrainConfig& cfg) {
  Model model = build_model(spec, cfg.seed);
  auto [standardized, scaler] = core::standardize(trace.samples());
  model.scaler = scaler;
  const auto dataset = core::make_windows(standardized, static_cast<std::size_t>(spec.input_window));
  return train(std::move(model), dataset, cfg);
}

}  // namespace cirpeak::nn
