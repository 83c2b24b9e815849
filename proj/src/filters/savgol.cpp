#include "cirpeak/filters/savgol.hpp"

#include <Eigen/QR>

#include "cirpeak/errors.hpp"

namespace cirpeak::filters {

std::vector<double> savgol_coefficients(int window, int polyorder) {
  if (window < 1 || window % 2 == 0) throw ValidationError("Savitzky-Golay window must be odd and positive");
  if (polyorder < 0 || polyorder >= window) throw ValidationError("polyorder must satisfy 0 <= polyorder < window");

  const int h = (window - 1) / 2;
  // Positions are scaled to [-1, 1]; the value at 0 is unaffected and the
  // Vandermonde matrix stays well conditioned for wide windows.
  const double scale = h > 0 ? 1.0 / h : 1.0;
  Eigen::MatrixXd vander(window, polyorder + 1);
  for (int i = 0; i < window; ++i) {
    const double x = (i - h) * scale;
    double p = 1.0;
    for (int j = 0; j <= polyorder; ++j) {
      vander(i, j) = p;
      p *= x;
    }
  }
  // Kernel = first row of pinv(V) = e0^T R^-1 Q^T.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(polyorder + 1).triangularView<Eigen::Upper>();
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(polyorder + 1);
  e0(0) = 1.0;
  // Row vector y^T = e0^T R^-1  <=>  R^T y = e0.
  const Eigen::VectorXd y = r.transpose().triangularView<Eigen::Lower>().solve(e0);
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(window);
  padded.head(polyorder + 1) = y;
  const Eigen::VectorXd kernel = qr.householderQ() * padded;
  return {kernel.data(), kernel.data() + kernel.size()};
}

std::vector<double> apply_savgol(std::span<const double> series, int window, int polyorder) {
  const std::vector<double> kernel = savgol_coefficients(window, polyorder);
  const int h = (window - 1) / 2;
  const int n = static_cast<int>(series.size());
  if (n < h + 1) throw InsufficientDataError("series shorter than half the Savitzky-Golay window");

  auto at = [&](int i) {
    if (i < 0) return series[static_cast<std::size_t>(-i - 1)];
    if (i >= n) return series[static_cast<std::size_t>(2 * n - i - 1)];
    return series[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -h; j <= h; ++j) acc += kernel[static_cast<std::size_t>(j + h)] * at(i + j);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace cirpeak::filters
