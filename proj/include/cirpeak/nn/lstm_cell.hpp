#pragma once

#include <Eigen/Dense>

#include "cirpeak/nn/model.hpp"
#include "cirpeak/nn/spec.hpp"

namespace cirpeak::nn {

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

/// One step of the cell:
///   i = sig(Wi x + Ui h + bi), f = sig(Wf x + Uf h + bf),
///   o = sig(Wo x + Uo h + bo), g = act(Wg x + Ug h + bg),
///   c' = f * c + i * g,        h' = o * act(c').
/// Gates stay logistic; `activation` applies to the candidate and the cell
/// output only. Throws ValidationError on shape mismatch.
LstmState lstm_cell_step(const LayerParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         const Eigen::VectorXd& c, Activation activation);

/// Analytic Jacobians of (h', c') with respect to the step inputs.
struct LstmCellJacobians {
  Eigen::MatrixXd dh_dx, dh_dh, dh_dc;
  Eigen::MatrixXd dc_dx, dc_dh, dc_dc;
};

LstmCellJacobians lstm_cell_jacobians(const LayerParams& params, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& h, const Eigen::VectorXd& c, Activation activation);

}  // namespace cirpeak::nn
