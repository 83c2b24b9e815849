#include "cirpeak/nn/network.hpp"

#include <string>

#include "cirpeak/errors.hpp"

namespace cirpeak::nn {
namespace {

using Eigen::MatrixXd;

MatrixXd activate(const MatrixXd& z, Activation a) {
  return a == Activation::relu ? MatrixXd(z.cwiseMax(0.0)) : z;
}

// Derivative expressed through the activation output; relu'(0) is taken as 0.
MatrixXd activation_grad(const MatrixXd& out, Activation a) {
  if (a == Activation::linear) return MatrixXd::Ones(out.rows(), out.cols());
  return (out.array() > 0.0).cast<double>().matrix();
}

void require_finite(const MatrixXd& m, std::size_t layer) {
  if (!m.allFinite()) {
    throw NumericalError("non-finite activation in layer " + std::to_string(layer) + "; values are exploding");
  }
}

Sequence dense_forward(const LayerSpec& spec, const LayerParams& p, const Sequence& in, LayerCache* cache) {
  Sequence out;
  out.reserve(in.size());
  for (const auto& x : in) {
    MatrixXd z = p.W * x;
    z.colwise() += p.b;
    out.push_back(activate(z, spec.activation));
  }
  if (cache) cache->output = out;
  return out;
}

Sequence lstm_forward(const LayerSpec& spec, const LayerParams& p, const Sequence& in, LayerCache* cache) {
  const Eigen::Index h = spec.width;
  const Eigen::Index batch = in.front().cols();
  const bool relu = spec.activation == Activation::relu;
  MatrixXd hidden = MatrixXd::Zero(h, batch);
  MatrixXd cell = MatrixXd::Zero(h, batch);
  MatrixXd z(4 * h, batch);
  Sequence out;
  if (cache) {
    cache->gates.reserve(in.size());
    cache->cells.reserve(in.size());
  }
  for (const auto& x : in) {
    z.noalias() = p.W * x;
    z.noalias() += p.U * hidden;
    z.colwise() += p.b;
    auto sig = z.topRows(3 * h).array();
    sig = 1.0 / (1.0 + (-sig).exp());
    if (relu) z.bottomRows(h) = z.bottomRows(h).cwiseMax(0.0);
    cell.array() = z.middleRows(h, h).array() * cell.array() + z.topRows(h).array() * z.bottomRows(h).array();
    if (relu) {
      hidden.array() = z.middleRows(2 * h, h).array() * cell.array().max(0.0);
    } else {
      hidden.array() = z.middleRows(2 * h, h).array() * cell.array();
    }
    if (cache) {
      cache->gates.push_back(z);
      cache->cells.push_back(cell);
    }
    if (spec.returns_sequence) out.push_back(hidden);
  }
  if (!spec.returns_sequence) out.push_back(hidden);
  if (cache) cache->output = out;
  return out;
}

Sequence dropout_forward(const LayerSpec& spec, const Sequence& in, Mode mode, std::mt19937_64* rng,
                         LayerCache* cache) {
  if (mode == Mode::infer || spec.rate == 0.0) return in;
  if (!rng) throw ValidationError("train-mode forward needs a random generator for dropout");
  const double keep = 1.0 - spec.rate;
  std::bernoulli_distribution draw(keep);
  Sequence out;
  out.reserve(in.size());
  for (const auto& x : in) {
    MatrixXd mask(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = draw(*rng) ? 1.0 / keep : 0.0;
    out.push_back(x.cwiseProduct(mask));
    if (cache) cache->mask.push_back(std::move(mask));
  }
  return out;
}

Sequence flatten_forward(const Sequence& in) {
  const Eigen::Index d = in.front().rows();
  MatrixXd flat(d * static_cast<Eigen::Index>(in.size()), in.front().cols());
  for (std::size_t t = 0; t < in.size(); ++t) flat.middleRows(static_cast<Eigen::Index>(t) * d, d) = in[t];
  return {std::move(flat)};
}

Sequence repeat_forward(const LayerSpec& spec, const Sequence& in) {
  return Sequence(static_cast<std::size_t>(spec.repeat), in.front());
}

// --- backward ---

Sequence dense_backward(const LayerSpec& spec, const LayerParams& p, const LayerCache& c, const Sequence& d_out,
                        LayerParams& g) {
  Sequence d_in;
  d_in.reserve(d_out.size());
  for (std::size_t t = 0; t < d_out.size(); ++t) {
    const MatrixXd dz = d_out[t].cwiseProduct(activation_grad(c.output[t], spec.activation));
    g.W.noalias() += dz * c.input[t].transpose();
    g.b += dz.rowwise().sum();
    d_in.push_back(p.W.transpose() * dz);
  }
  return d_in;
}

Sequence lstm_backward(const LayerSpec& spec, const LayerParams& p, const LayerCache& c, const Sequence& d_out,
                       LayerParams& g) {
  const Eigen::Index h = spec.width;
  const std::size_t steps = c.input.size();
  const Eigen::Index batch = c.input.front().cols();
  MatrixXd dh_next = MatrixXd::Zero(h, batch);
  MatrixXd dc_next = MatrixXd::Zero(h, batch);
  const MatrixXd zero = MatrixXd::Zero(h, batch);
  Sequence d_in(steps);
  MatrixXd dz(4 * h, batch);

  for (std::size_t s = steps; s-- > 0;) {
    MatrixXd dh = dh_next;
    if (spec.returns_sequence) {
      dh += d_out[s];
    } else if (s + 1 == steps) {
      dh += d_out.front();
    }
    const MatrixXd& gates = c.gates[s];
    const auto i = gates.topRows(h);
    const auto f = gates.middleRows(h, h);
    const auto o = gates.middleRows(2 * h, h);
    const auto gg = gates.bottomRows(h);
    const MatrixXd& cell = c.cells[s];
    const MatrixXd& cell_prev = s > 0 ? c.cells[s - 1] : zero;

    const MatrixXd ac = activate(cell, spec.activation);
    const MatrixXd dc = dc_next + dh.cwiseProduct(o).cwiseProduct(activation_grad(ac, spec.activation));

    dz.topRows(h) = dc.cwiseProduct(gg).cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
    dz.middleRows(h, h) = dc.cwiseProduct(cell_prev).cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
    dz.middleRows(2 * h, h) = dh.cwiseProduct(ac).cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());
    dz.bottomRows(h) = dc.cwiseProduct(i).cwiseProduct(activation_grad(gg, spec.activation));
    dc_next = dc.cwiseProduct(f);

    g.W.noalias() += dz * c.input[s].transpose();
    g.b += dz.rowwise().sum();
    if (s > 0) {
      // h_{s-1} is the layer's hidden output at step s-1; recompute from
      // the cached gates and cell so returns_sequence=false layers work too.
      const MatrixXd h_prev =
          c.gates[s - 1].middleRows(2 * h, h).cwiseProduct(activate(c.cells[s - 1], spec.activation));
      g.U.noalias() += dz * h_prev.transpose();
    }
    d_in[s] = p.W.transpose() * dz;
    dh_next = p.U.transpose() * dz;
  }
  return d_in;
}

Sequence dropout_backward(const LayerCache& c, const Sequence& d_out) {
  if (c.mask.empty()) return d_out;
  Sequence d_in;
  d_in.reserve(d_out.size());
  for (std::size_t t = 0; t < d_out.size(); ++t) d_in.push_back(d_out[t].cwiseProduct(c.mask[t]));
  return d_in;
}

Sequence flatten_backward(const LayerCache& c, const Sequence& d_out) {
  const Eigen::Index d = c.input.front().rows();
  Sequence d_in;
  d_in.reserve(c.input.size());
  for (std::size_t t = 0; t < c.input.size(); ++t) {
    d_in.push_back(d_out.front().middleRows(static_cast<Eigen::Index>(t) * d, d));
  }
  return d_in;
}

Sequence repeat_backward(const Sequence& d_out) {
  MatrixXd sum = d_out.front();
  for (std::size_t t = 1; t < d_out.size(); ++t) sum += d_out[t];
  return {std::move(sum)};
}

}  // namespace

Eigen::RowVectorXd forward_batch(const Model& model, const MatrixXd& windows, Mode mode, std::mt19937_64* rng,
                                 ForwardCache* cache) {
  const Eigen::Index k = model.spec.input_window;
  if (windows.rows() != k) {
    throw ValidationError("window length " + std::to_string(windows.rows()) + " does not match model k=" +
                          std::to_string(k));
  }
  if (windows.cols() < 1) throw ValidationError("empty batch");
  if (!windows.allFinite()) throw ValidationError("window contains non-finite values");

  Sequence x;
  if (model.sequence_input) {
    x.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index t = 0; t < k; ++t) x.emplace_back(windows.row(t));
  } else {
    x.push_back(windows);
  }

  if (cache) {
    cache->layers.assign(model.layers.size(), {});
    cache->batch = windows.cols();
    cache->digest = parameter_digest(model.params);
  }

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerSpec& spec = model.layers[l];
    LayerCache* lc = cache ? &cache->layers[l] : nullptr;
    if (lc) lc->input = x;
    switch (spec.kind) {
      case LayerKind::dense:
      case LayerKind::time_distributed_dense:
        x = dense_forward(spec, model.params[l], x, lc);
        break;
      case LayerKind::lstm:
        x = lstm_forward(spec, model.params[l], x, lc);
        break;
      case LayerKind::dropout:
        x = dropout_forward(spec, x, mode, rng, lc);
        break;
      case LayerKind::flatten:
        x = flatten_forward(x);
        break;
      case LayerKind::repeat_vector:
        x = repeat_forward(spec, x);
        break;
    }
    require_finite(x.back(), l);
  }
  return x.back().row(0);
}

Prediction forward(const Model& model, std::span<const double> window, Mode mode, std::mt19937_64& rng) {
  const Eigen::Map<const Eigen::VectorXd> w(window.data(), static_cast<Eigen::Index>(window.size()));
  Prediction p;
  p.value = forward_batch(model, MatrixXd(w), mode, &rng, &p.cache)(0);
  return p;
}

ParamSet backward(const Model& model, const ForwardCache& cache, const Eigen::RowVectorXd& d_prediction) {
  if (cache.layers.size() != model.layers.size() || cache.digest != parameter_digest(model.params)) {
    throw ValidationError("forward cache does not belong to this model state");
  }
  if (d_prediction.size() != cache.batch) throw ValidationError("gradient batch size does not match the cache");

  ParamSet grads = zeros_like(model.params);
  const LayerCache& last = cache.layers.back();
  Sequence d(last.output.size());
  for (std::size_t t = 0; t < d.size(); ++t) d[t] = MatrixXd::Zero(last.output[t].rows(), last.output[t].cols());
  d.back().row(0) = d_prediction;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const LayerSpec& spec = model.layers[l];
    const LayerCache& lc = cache.layers[l];
    switch (spec.kind) {
      case LayerKind::dense:
      case LayerKind::time_distributed_dense:
        d = dense_backward(spec, model.params[l], lc, d, grads[l]);
        break;
      case LayerKind::lstm:
        d = lstm_backward(spec, model.params[l], lc, d, grads[l]);
        break;
      case LayerKind::dropout:
        d = dropout_backward(lc, d);
        break;
      case LayerKind::flatten:
        d = flatten_backward(lc, d);
        break;
      case LayerKind::repeat_vector:
        d = repeat_backward(d);
        break;
    }
  }
  return grads;
}

ParamSet backward(const Model& model, const ForwardCache& cache, double d_prediction) {
  Eigen::RowVectorXd d(1);
  d(0) = d_prediction;
  return backward(model, cache, d);
}

std::vector<bool> relu_pattern(const Model& model, const ForwardCache& cache) {
  std::vector<bool> pattern;
  auto append = [&pattern](const MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) pattern.push_back(m.data()[i] > 0.0);
  };
  for (std::size_t l = 0; l < model.layers.size() && l < cache.layers.size(); ++l) {
    const LayerSpec& spec = model.layers[l];
    if (spec.activation != Activation::relu) continue;
    const LayerCache& lc = cache.layers[l];
    if (spec.kind == LayerKind::lstm) {
      const Eigen::Index h = spec.width;
      for (const auto& g : lc.gates) append(g.bottomRows(h));
      for (const auto& c : lc.cells) append(c);
    } else if (spec.has_parameters()) {
      for (const auto& o : lc.output) append(o);
    }
  }
  return pattern;
}

}  // namespace cirpeak::nn
