#include <doctest.h>

#include <cmath>
#include <random>

#include "cirpeak/core/scaler.hpp"
#include "cirpeak/core/synth.hpp"
#include "cirpeak/core/windows.hpp"
#include "cirpeak/errors.hpp"
#include "cirpeak/nn/gradcheck.hpp"
#include "cirpeak/nn/lstm_cell.hpp"
#include "cirpeak/nn/model.hpp"
#include "cirpeak/nn/model_io.hpp"
#include "cirpeak/nn/network.hpp"
#include "cirpeak/nn/predict.hpp"
#include "cirpeak/nn/train.hpp"
#include "support/oracles.hpp"

using namespace cirpeak;
using namespace cirpeak::nn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void zero_parameters(Model& m) {
  for_each_scalar(m.params, [](double& p) { p = 0.0; });
}

LayerParams random_lstm_params(std::mt19937_64& rng, int in, int h, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  LayerParams p;
  p.W = MatrixXd::NullaryExpr(4 * h, in, [&] { return d(rng); });
  p.U = MatrixXd::NullaryExpr(4 * h, h, [&] { return d(rng); });
  p.b = VectorXd::NullaryExpr(4 * h, [&] { return d(rng); });
  return p;
}

VectorXd random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return VectorXd::NullaryExpr(n, [&] { return d(rng); });
}

// Central-difference Jacobian of one output of the cell step.
template <typename Fn>
MatrixXd numeric_jacobian(Fn&& f, const VectorXd& at, int rows) {
  constexpr double eps = 1e-6;
  MatrixXd J(rows, at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    VectorXd p = at, m = at;
    p(j) += eps;
    m(j) -= eps;
    J.col(j) = (f(p) - f(m)) / (2 * eps);
  }
  return J;
}

double max_rel(const MatrixXd& a, const MatrixXd& n) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a.data()[i]), std::abs(n.data()[i]), 1e-6});
    worst = std::max(worst, std::abs(a.data()[i] - n.data()[i]) / denom);
  }
  return worst;
}

const core::CirTrace& demo_trace() {
  static const core::CirTrace trace = core::generate_synthetic_trace(core::synth_preset("demo")).first;
  return trace;
}

const TrainResult& trained_table4() {
  static const TrainResult result = fit_trace(preset_spec("table4"), demo_trace(), TrainConfig{});
  return result;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("preset widths and halving") {
  CHECK(layer_widths(effective_layers(preset_spec("table2"))) == std::vector<int>{64, 32, 16, 32, 64, 1});
  CHECK(layer_widths(effective_layers(preset_spec("table2", 100, 0.125))) ==
        layer_widths(effective_layers(preset_spec("table4"))));
  CHECK(layer_widths(effective_layers(preset_spec("table4"))) == std::vector<int>{8, 4, 2, 4, 8, 1});
  CHECK(layer_widths(effective_layers(preset_spec("table1"))) == std::vector<int>{64, 32, 16, 32, 64, 1});
  CHECK(layer_widths(effective_layers(preset_spec("table1", 100, 0.5))) == std::vector<int>{32, 16, 8, 16, 32, 1});
  CHECK_THROWS_AS(effective_layers(preset_spec("table2", 100, 1.0 / 16)), ValidationError);
  CHECK_THROWS_AS(effective_layers(preset_spec("table4", 100, 0.125)), ValidationError);
  CHECK_THROWS_AS(effective_layers(preset_spec("table2", 100, 0.3)), ValidationError);
  CHECK_THROWS_AS(preset_spec("table9"), ValidationError);
  CHECK(preset_spec("lstm").layers == preset_spec("table2").layers);
  CHECK(preset_spec("fcnn").layers == preset_spec("table1").layers);
}

TEST_CASE("spec must end in a width-1 time distributed dense") {
  ModelSpec s;
  s.input_window = 4;
  s.layers = {LayerSpec::dense(3)};
  CHECK_THROWS_AS(effective_layers(s), ValidationError);
  s.layers = {LayerSpec::dense(3), LayerSpec::time_distributed_dense(2)};
  CHECK_THROWS_AS(effective_layers(s), ValidationError);
  s.layers = {LayerSpec::dense(3), LayerSpec::time_distributed_dense(1)};
  CHECK_NOTHROW(effective_layers(s));
  s.layers = {LayerSpec::dropout(1.0), LayerSpec::time_distributed_dense(1)};
  CHECK_THROWS_AS(effective_layers(s), ValidationError);
}

TEST_CASE("build is deterministic and follows the init recipe") {
  const auto spec = preset_spec("table2", 20, 0.25);
  const Model a = build_model(spec, 5);
  const Model b = build_model(spec, 5);
  const Model c = build_model(spec, 6);
  CHECK(parameter_digest(a.params) == parameter_digest(b.params));
  CHECK(parameter_digest(a.params) != parameter_digest(c.params));
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].kind != LayerKind::lstm) continue;
    const auto& p = a.params[l];
    const Eigen::Index h = a.layers[l].width;
    CHECK(p.b.segment(h, h).isConstant(1.0));
    CHECK(p.b.head(h).isZero());
    CHECK(p.b.tail(2 * h).isZero());
    const double bound_w = std::sqrt(6.0 / static_cast<double>(p.W.cols() + p.W.rows()));
    CHECK(p.W.cwiseAbs().maxCoeff() <= bound_w);
  }
}

TEST_CASE("lstm cell zero-parameter cases") {
  LayerParams p;
  p.W = MatrixXd::Zero(4, 1);
  p.U = MatrixXd::Zero(4, 1);
  p.b = VectorXd::Zero(4);
  const VectorXd x = VectorXd::Constant(1, 3.7);
  auto s = lstm_cell_step(p, x, VectorXd::Zero(1), VectorXd::Zero(1), Activation::relu);
  CHECK(s.h(0) == 0.0);
  CHECK(s.c(0) == 0.0);
  s = lstm_cell_step(p, x, VectorXd::Zero(1), VectorXd::Constant(1, 2.0), Activation::relu);
  CHECK(s.c(0) == doctest::Approx(1.0));
  CHECK(s.h(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(lstm_cell_step(p, VectorXd::Zero(2), VectorXd::Zero(1), VectorXd::Zero(1), Activation::relu),
                  ValidationError);
}

TEST_CASE("lstm cell jacobians match finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = gen::uniform_int(rng, 1, 4);
    const int h = gen::uniform_int(rng, 1, 5);
    const auto act = trial % 2 ? Activation::relu : Activation::linear;
    const LayerParams p = random_lstm_params(rng, in, h, 0.5);
    const VectorXd x = random_vec(rng, in, -1, 1);
    const VectorXd hh = random_vec(rng, h, -1, 1);
    // Positive cells keep the relu output away from its kink.
    const VectorXd c = random_vec(rng, h, 0.5, 1.5);
    const auto J = lstm_cell_jacobians(p, x, hh, c, act);
    auto H = [&](const VectorXd& xi, const VectorXd& hi, const VectorXd& ci) {
      return lstm_cell_step(p, xi, hi, ci, act);
    };
    CHECK(max_rel(J.dh_dx, numeric_jacobian([&](const VectorXd& v) { return H(v, hh, c).h; }, x, h)) < 1e-4);
    CHECK(max_rel(J.dh_dh, numeric_jacobian([&](const VectorXd& v) { return H(x, v, c).h; }, hh, h)) < 1e-4);
    CHECK(max_rel(J.dh_dc, numeric_jacobian([&](const VectorXd& v) { return H(x, hh, v).h; }, c, h)) < 1e-4);
    CHECK(max_rel(J.dc_dx, numeric_jacobian([&](const VectorXd& v) { return H(v, hh, c).c; }, x, h)) < 1e-4);
    CHECK(max_rel(J.dc_dh, numeric_jacobian([&](const VectorXd& v) { return H(x, v, c).c; }, hh, h)) < 1e-4);
    CHECK(max_rel(J.dc_dc, numeric_jacobian([&](const VectorXd& v) { return H(x, hh, v).c; }, c, h)) < 1e-4);
  }
}

TEST_CASE("zero parameters predict zero for every preset") {
  std::mt19937_64 rng(2);
  for (const char* name : {"table1", "table2", "table3", "table4"}) {
    Model m = build_model(preset_spec(name, 16), 1);
    zero_parameters(m);
    const auto w = gen::normal_series(rng, 16);
    CHECK(forward(m, w, Mode::infer, rng).value == 0.0);
  }
}

TEST_CASE("forward validation and determinism") {
  Model m = build_model(preset_spec("table4", 12), 3);
  std::mt19937_64 rng(1);
  const auto w = gen::normal_series(rng, 12);
  CHECK(forward(m, w, Mode::infer, rng).value == forward(m, w, Mode::infer, rng).value);
  std::mt19937_64 r1(9), r2(9);
  CHECK(forward(m, w, Mode::train, r1).value == forward(m, w, Mode::train, r2).value);
  CHECK_THROWS_AS(forward(m, std::vector<double>(11, 0.0), Mode::infer, rng), ValidationError);
  auto bad = w;
  bad[3] = NAN;
  CHECK_THROWS_AS(forward(m, bad, Mode::infer, rng), ValidationError);
  CHECK_THROWS_AS(forward_batch(m, MatrixXd::Zero(12, 2), Mode::train, nullptr, nullptr), ValidationError);

  // Batched columns agree with single-window calls.
  MatrixXd batch(12, 3);
  std::vector<double> single;
  for (int j = 0; j < 3; ++j) {
    const auto v = gen::normal_series(rng, 12);
    batch.col(j) = Eigen::Map<const VectorXd>(v.data(), 12);
    single.push_back(forward(m, v, Mode::infer, rng).value);
  }
  const auto out = forward_batch(m, batch, Mode::infer, nullptr, nullptr);
  for (int j = 0; j < 3; ++j) CHECK(out(j) == doctest::Approx(single[static_cast<std::size_t>(j)]).epsilon(1e-13));
}

TEST_CASE("exploding activations raise a numerical error") {
  Model m = build_model(preset_spec("table1", 8), 3);
  for_each_scalar(m.params, [](double& p) { p = 1e200; });
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(forward(m, std::vector<double>(8, 1.0), Mode::infer, rng), NumericalError);
}

TEST_CASE("inverted dropout is unbiased on a linear model") {
  ModelSpec s;
  s.input_window = 6;
  s.layers = {LayerSpec::dense(5, Activation::linear), LayerSpec::dropout(0.2),
              LayerSpec::dense(4, Activation::linear), LayerSpec::dropout(0.2),
              LayerSpec::time_distributed_dense(1)};
  const Model m = build_model(s, 4);
  std::mt19937_64 rng(8);
  const auto w = gen::normal_series(rng, 6);
  const double expected = forward(m, w, Mode::infer, rng).value;
  constexpr int kDraws = 10000;
  double sum = 0.0, sq = 0.0;
  for (int seed = 0; seed < kDraws; ++seed) {
    std::mt19937_64 r(static_cast<std::uint64_t>(seed));
    const double v = forward(m, w, Mode::train, r).value;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / kDraws;
  const double sd = std::sqrt(std::max(0.0, sq / kDraws - mean * mean));
  CHECK(sd > 0.0);
  CHECK(std::abs(mean - expected) < 3.0 * sd / std::sqrt(static_cast<double>(kDraws)));
}

TEST_CASE("backward of a linear network equals the closed form") {
  ModelSpec s;
  s.input_window = 5;
  s.layers = {LayerSpec::dense(3, Activation::linear), LayerSpec::time_distributed_dense(1)};
  const Model m = build_model(s, 12);
  std::mt19937_64 rng(4);
  const auto w = gen::normal_series(rng, 5);
  const VectorXd x = Eigen::Map<const VectorXd>(w.data(), 5);
  Prediction p = forward(m, w, Mode::infer, rng);
  const double d = 0.37;
  const ParamSet g = backward(m, p.cache, d);

  const auto& W1 = m.params[0].W;
  const auto& b1 = m.params[0].b;
  const auto& W2 = m.params[1].W;
  const VectorXd hidden = W1 * x + b1;
  CHECK(p.value == doctest::Approx((W2 * hidden)(0) + m.params[1].b(0)).epsilon(1e-14));
  CHECK((g[1].W - d * hidden.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(g[1].b(0) - d) < 1e-15);
  CHECK((g[0].W - d * W2.transpose() * x.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((g[0].b - d * W2.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero upstream gradient gives zero gradients") {
  for (const char* name : {"table1", "table4"}) {
    const Model m = build_model(preset_spec(name, 10), 2);
    std::mt19937_64 rng(5);
    const auto w = gen::normal_series(rng, 10);
    Prediction p = forward(m, w, Mode::train, rng);
    ParamSet g = backward(m, p.cache, 0.0);
    bool all_zero = true;
    for_each_scalar(g, [&all_zero](double& v) { all_zero = all_zero && v == 0.0; });
    CHECK(all_zero);
  }
}

TEST_CASE("backward rejects a stale cache") {
  Model m = build_model(preset_spec("table4", 10), 2);
  std::mt19937_64 rng(5);
  Prediction p = forward(m, gen::normal_series(rng, 10), Mode::infer, rng);
  CHECK_NOTHROW(backward(m, p.cache, 1.0));
  CHECK_THROWS_AS(backward(m, p.cache, Eigen::RowVectorXd::Ones(2)), ValidationError);
  m.params[0].W(0, 0) += 1e-3;
  CHECK_THROWS_AS(backward(m, p.cache, 1.0), ValidationError);
  const Model other = build_model(preset_spec("table1", 10), 2);
  CHECK_THROWS_AS(backward(other, p.cache, 1.0), ValidationError);
}

TEST_CASE("gradient check on small presets") {
  ModelSpec linear;
  linear.input_window = 7;
  linear.layers = {LayerSpec::time_distributed_dense(1)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) CHECK(grad_check(linear, seed).max_relative_error < 1e-7);

  for (const char* name : {"table1", "table2", "table3"}) {
    const auto r = grad_check(preset_spec(name, 8, 0.125), 3);
    CHECK(r.max_relative_error < 1e-4);
    CHECK(r.checked > 0);
  }
  const auto r = grad_check(preset_spec("table4", 8), 3);
  CHECK(r.max_relative_error < 1e-4);

  const auto a = grad_check(preset_spec("table4", 8), 9);
  const auto b = grad_check(preset_spec("table4", 8), 9);
  CHECK(a.max_relative_error == b.max_relative_error);
  CHECK(a.checked == b.checked);
}

TEST_CASE("training on a perfectly fitted toy leaves parameters put") {
  ModelSpec s;
  s.input_window = 4;
  s.layers = {LayerSpec::dense(3), LayerSpec::dropout(0.2), LayerSpec::time_distributed_dense(1)};
  Model m = build_model(s, 1);
  m.params.back().W.setZero();
  m.params.back().b.setZero();
  std::mt19937_64 rng(2);
  const core::WindowedDataset ds(4, gen::normal_series(rng, 4 * 40), std::vector<double>(40, 0.0));
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto before = parameter_digest(m.params);
  const auto r = train(m, ds, cfg);
  REQUIRE(r.history.epochs.size() == 3);
  CHECK(r.history.epochs.front().loss == 0.0);
  CHECK(r.model.params.back().W.isZero());
  CHECK(r.model.params.back().b.isZero());
  CHECK(parameter_digest(r.model.params) == before);
}

TEST_CASE("training validation") {
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = TrainConfig{};
  cfg.learning_rate = 1.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);

  const Model m = build_model(preset_spec("table4", 5), 1);
  const core::WindowedDataset wrong_k(4, std::vector<double>(8, 0.0), std::vector<double>(2, 0.0));
  CHECK_THROWS_AS(train(m, wrong_k, TrainConfig{}), ValidationError);
}

TEST_CASE("divergent training reports epoch and batch") {
  ModelSpec s;
  s.input_window = 3;
  s.layers = {LayerSpec::dense(4, Activation::linear), LayerSpec::time_distributed_dense(1)};
  Model m = build_model(s, 1);
  for_each_scalar(m.params, [](double& p) { p *= 1e150; });
  std::mt19937_64 rng(2);
  const core::WindowedDataset ds(3, gen::normal_series(rng, 3 * 10, 0, 1e10), std::vector<double>(10, 1.0));
  try {
    train(m, ds, TrainConfig{});
    FAIL("expected divergence");
  } catch (const NumericalError& e) {
    const std::string what = e.what();
    CHECK(what.find("epoch 1") != std::string::npos);
    CHECK(what.find("batch 0") != std::string::npos);
  }
}

TEST_CASE("training is reproducible") {
  const auto spec = preset_spec("table4", 10);
  TrainConfig cfg;
  cfg.epochs = 2;
  const auto a = fit_trace(spec, demo_trace(), cfg);
  const auto b = fit_trace(spec, demo_trace(), cfg);
  CHECK(parameter_digest(a.model.params) == parameter_digest(b.model.params));
  CHECK(a.history.epochs.back().loss == b.history.epochs.back().loss);
}

TEST_CASE("table4 learns the demo trace") {
  const auto& r = trained_table4();
  REQUIRE(r.history.epochs.size() == 20);
  CHECK(r.history.epochs.front().epoch == 1);
  CHECK(r.history.final_loss() < r.history.epochs.front().loss);
  for (const auto& e : r.history.epochs) {
    CHECK(std::isfinite(e.loss));
    CHECK(e.loss >= 0.0);
  }
  const auto csv = r.history.to_csv();
  CHECK(csv.rfind("epoch,loss,seconds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("trained predictor follows the noise floor") {
  const auto& model = trained_table4().model;
  const auto [trace, truth] = core::generate_synthetic_trace(core::synth_preset("demo"));
  const auto pred = predict_series(model, trace);
  REQUIRE(pred.values.size() == trace.size());
  std::vector<bool> near_peak(trace.size(), false);
  for (const auto& c : truth.clusters)
    for (int x = std::max(0, c.start_index - 10); x <= std::min<int>(static_cast<int>(trace.size()) - 1, c.end_index + 10); ++x)
      near_peak[static_cast<std::size_t>(x)] = true;
  double sum = 0.0;
  int count = 0;
  for (std::size_t x = pred.warmup_len; x < trace.size(); ++x) {
    if (near_peak[x]) continue;
    sum += std::abs(trace.samples()[x] - pred.values[x]);
    ++count;
  }
  CHECK(sum / count < core::synth_preset("demo").noise_sigma_db);
}

TEST_CASE("predict_series shape and zero model") {
  Model m = build_model(preset_spec("table4", 10), 1);
  zero_parameters(m);
  m.scaler = {3.5, 2.0};
  std::mt19937_64 rng(1);
  const core::CirTrace t(gen::normal_series(rng, 57), 1.0, "t");
  const auto p = predict_series(m, t);
  REQUIRE(p.values.size() == t.size());
  CHECK(p.warmup_len == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(p.values[i] == t.samples()[i]);
  for (std::size_t i = 10; i < t.size(); ++i) CHECK(p.values[i] == 3.5);
  CHECK_THROWS_AS(predict_series(m, core::CirTrace(std::vector<double>(10, 1.0), 1.0, "short")),
                  InsufficientDataError);
}

TEST_CASE("model json round trip") {
  Model m = build_model(preset_spec("table2", 6, 0.125), 4);
  m.scaler = {1.25, 0.5};
  const std::string text = model_to_json(m);
  const Model back = model_from_json(text);
  CHECK(parameter_digest(back.params) == parameter_digest(m.params));
  CHECK(back.scaler.mean == 1.25);
  CHECK(back.scaler.std == 0.5);
  CHECK(back.spec.scale == 0.125);
  CHECK(model_to_json(back) == text);

  const auto j = nlohmann::json::parse(text);
  CHECK(j["layers"].size() == 5);
  CHECK(j["layers"][0]["kind"] == "lstm");
  CHECK(j["layers"][0]["W"].size() == 32);  // 4 gates x 8 units, row-major

  CHECK_THROWS_AS(model_from_json("{"), ParseError);
  auto broken = j;
  broken["layers"][0]["b"].erase(0);
  CHECK_THROWS_AS(model_from_json(broken.dump()), ParseError);
  broken = j;
  broken["layers"].erase(1);
  CHECK_THROWS_AS(model_from_json(broken.dump()), ParseError);
}

}  // TEST_SUITE
