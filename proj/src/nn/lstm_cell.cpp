#include "cirpeak/nn/lstm_cell.hpp"

#include "cirpeak/errors.hpp"

namespace cirpeak::nn {
namespace {

struct Gates {
  Eigen::VectorXd i, f, o, g, c_next;
};

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

Eigen::VectorXd act(const Eigen::VectorXd& z, Activation a) {
  return a == Activation::relu ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
}

Eigen::VectorXd act_grad(const Eigen::VectorXd& z, Activation a) {
  if (a == Activation::linear) return Eigen::VectorXd::Ones(z.size());
  return (z.array() > 0.0).cast<double>().matrix();
}

void check_shapes(const LayerParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                  const Eigen::VectorXd& c) {
  const Eigen::Index hidden = p.U.cols();
  if (p.W.rows() != 4 * hidden || p.U.rows() != 4 * hidden || p.b.size() != 4 * hidden) {
    throw ValidationError("lstm parameters are not 4H-stacked");
  }
  if (x.size() != p.W.cols()) throw ValidationError("lstm input size mismatch");
  if (h.size() != hidden || c.size() != hidden) throw ValidationError("lstm state size mismatch");
}

Gates compute(const LayerParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& h, const Eigen::VectorXd& c,
              Activation a, Eigen::VectorXd* zg_out) {
  check_shapes(p, x, h, c);
  const Eigen::Index n = p.U.cols();
  const Eigen::VectorXd z = p.W * x + p.U * h + p.b;
  Gates g;
  g.i = sigmoid(z.segment(0, n));
  g.f = sigmoid(z.segment(n, n));
  g.o = sigmoid(z.segment(2 * n, n));
  g.g = act(z.segment(3 * n, n), a);
  g.c_next = g.f.cwiseProduct(c) + g.i.cwiseProduct(g.g);
  if (zg_out) *zg_out = z.segment(3 * n, n);
  return g;
}

}  // namespace

LstmState lstm_cell_step(const LayerParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         const Eigen::VectorXd& c, Activation activation) {
  const Gates g = compute(params, x, h, c, activation, nullptr);
  return {g.o.cwiseProduct(act(g.c_next, activation)), g.c_next};
}

LstmCellJacobians lstm_cell_jacobians(const LayerParams& params, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& h, const Eigen::VectorXd& c, Activation activation) {
  Eigen::VectorXd zg;
  const Gates g = compute(params, x, h, c, activation, &zg);
  const Eigen::Index n = params.U.cols();

  // d(gate pre-activation) rows scaled by the gate nonlinearity derivative.
  const Eigen::VectorXd di = g.i.cwiseProduct(Eigen::VectorXd::Ones(n) - g.i);
  const Eigen::VectorXd df = g.f.cwiseProduct(Eigen::VectorXd::Ones(n) - g.f);
  const Eigen::VectorXd dout = g.o.cwiseProduct(Eigen::VectorXd::Ones(n) - g.o);
  const Eigen::VectorXd dg = act_grad(zg, activation);

  // dc'/dz for each gate block: diag(g*di), diag(c*df), 0, diag(i*dg).
  auto dc_d = [&](const Eigen::MatrixXd& w) {
    return Eigen::MatrixXd((g.g.cwiseProduct(di)).asDiagonal() * w.middleRows(0, n) +
                           (c.cwiseProduct(df)).asDiagonal() * w.middleRows(n, n) +
                           (g.i.cwiseProduct(dg)).asDiagonal() * w.middleRows(3 * n, n));
  };

  LstmCellJacobians j;
  j.dc_dx = dc_d(params.W);
  j.dc_dh = dc_d(params.U);
  j.dc_dc = g.f.asDiagonal();

  const Eigen::VectorXd ac = act(g.c_next, activation);
  const Eigen::VectorXd ac_grad = act_grad(g.c_next, activation);
  const Eigen::VectorXd via_c = g.o.cwiseProduct(ac_grad);
  auto dh_d = [&](const Eigen::MatrixXd& w, const Eigen::MatrixXd& dc) {
    return Eigen::MatrixXd((ac.cwiseProduct(dout)).asDiagonal() * w.middleRows(2 * n, n) + via_c.asDiagonal() * dc);
  };
  j.dh_dx = dh_d(params.W, j.dc_dx);
  j.dh_dh = dh_d(params.U, j.dc_dh);
  j.dh_dc = via_c.asDiagonal() * j.dc_dc;
  return j;
}

}  // namespace cirpeak::nn
