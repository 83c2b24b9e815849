#include "cirpeak/filters/iir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cirpeak/errors.hpp"

namespace cirpeak::filters {
namespace {

using cplx = std::complex<double>;

void check_design_args(int order, double cutoff) {
  if (order < 1) throw ValidationError("filter order must be >= 1");
  if (!(cutoff > 0.0 && cutoff < 0.5)) throw ValidationError("cutoff must lie strictly between 0 and 0.5 * Fs");
}

// Analog lowpass poles (prototype at 1 rad/s) to a digital cascade: scale
// to the prewarped cutoff, map through s = 2 (z - 1) / (z + 1), put all
// zeros at z = -1 and normalize every section to unit DC gain.
IirCoefficients bilinear_lowpass(const std::vector<cplx>& prototype, double cutoff) {
  const double warped = 2.0 * std::tan(std::numbers::pi * cutoff);
  std::vector<cplx> complex_poles;
  std::vector<double> real_poles;
  for (const cplx& p : prototype) {
    const cplx s = p * warped;
    const cplx z = (2.0 + s) / (2.0 - s);
    if (std::abs(p.imag()) <= 1e-10 * std::max(1.0, std::abs(p))) {
      real_poles.push_back(z.real());
    } else if (p.imag() > 0.0) {
      complex_poles.push_back(z);
    }
  }
  if (complex_poles.size() * 2 + real_poles.size() != prototype.size()) {
    throw NumericalError("prototype poles do not come in conjugate pairs");
  }

  // Poles nearest the unit circle go last.
  std::sort(complex_poles.begin(), complex_poles.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  std::sort(real_poles.begin(), real_poles.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });

  IirCoefficients out;
  // Two real poles share a biquad; a leftover one becomes a first-order stage.
  while (real_poles.size() >= 2) {
    const double p1 = real_poles[0];
    const double p2 = real_poles[1];
    real_poles.erase(real_poles.begin(), real_poles.begin() + 2);
    Biquad s;
    s.a1 = -(p1 + p2);
    s.a2 = p1 * p2;
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    out.sections.push_back(s);
  }
  if (!real_poles.empty()) {
    Biquad s;
    s.a1 = -real_poles.front();
    const double g = (1.0 + s.a1) / 2.0;
    s.b0 = g;
    s.b1 = g;
    out.sections.push_back(s);
  }
  for (const cplx& z : complex_poles) {
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    out.sections.push_back(s);
  }
  if (max_pole_radius(out) >= 1.0) throw NumericalError("designed filter is unstable");
  return out;
}

cplx section_response(const Biquad& s, cplx z_inv) {
  return (s.b0 + z_inv * (s.b1 + z_inv * s.b2)) / (1.0 + z_inv * (s.a1 + z_inv * s.a2));
}

// Transposed direct form II, state per section.
struct SectionState {
  double z1 = 0.0;
  double z2 = 0.0;
};

std::vector<SectionState> steady_state(const IirCoefficients& coeffs, double level) {
  std::vector<SectionState> zi;
  double scale = level * coeffs.overall_gain;
  for (const Biquad& s : coeffs.sections) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    SectionState st;
    st.z2 = (s.b2 - s.a2 * gain) * scale;
    st.z1 = (s.b1 - s.a1 * gain) * scale + st.z2;
    zi.push_back(st);
    scale *= gain;
  }
  return zi;
}

std::vector<double> run_cascade(const IirCoefficients& coeffs, std::span<const double> x,
                                std::vector<SectionState> state) {
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v *= coeffs.overall_gain;
  for (std::size_t k = 0; k < coeffs.sections.size(); ++k) {
    const Biquad& s = coeffs.sections[k];
    SectionState& st = state[k];
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + st.z1;
      st.z1 = s.b1 * in - s.a1 * out + st.z2;
      st.z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

}  // namespace

IirCoefficients design_butterworth(int order, double cutoff_fraction_fs) {
  check_design_args(order, cutoff_fraction_fs);
  std::vector<cplx> poles;
  for (int m = 1; m <= order; ++m) {
    poles.push_back(std::polar(1.0, std::numbers::pi * (2.0 * m + order - 1.0) / (2.0 * order)));
  }
  return bilinear_lowpass(poles, cutoff_fraction_fs);
}

std::vector<double> bessel_polynomial(int order) {
  if (order < 0) throw ValidationError("polynomial order must be >= 0");
  // Ascending-power coefficients; theta_n = (2n - 1) theta_{n-1} + s^2 theta_{n-2}.
  std::vector<double> prev2{1.0};
  if (order == 0) return prev2;
  std::vector<double> prev1{1.0, 1.0};
  for (int n = 2; n <= order; ++n) {
    std::vector<double> next(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < prev1.size(); ++i) next[i] += (2.0 * n - 1.0) * prev1[i];
    for (std::size_t i = 0; i < prev2.size(); ++i) next[i + 2] += prev2[i];
    prev2 = std::move(prev1);
    prev1 = std::move(next);
  }
  std::reverse(prev1.begin(), prev1.end());
  return prev1;
}

std::vector<cplx> bessel_prototype_poles(int order) {
  if (order < 1 || order > 25) throw ValidationError("Bessel order must lie in [1, 25]");
  const std::vector<double> poly = bessel_polynomial(order);  // monic, highest first

  // Companion matrix eigenvalues.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (int j = 0; j < order; ++j) companion(0, j) = -poly[static_cast<std::size_t>(j) + 1];
  for (int i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("Bessel root finding failed");
  std::vector<cplx> roots;
  for (int i = 0; i < order; ++i) {
    cplx r = solver.eigenvalues()(i);
    // Newton polish on the original polynomial.
    for (int it = 0; it < 3; ++it) {
      cplx p = 0.0;
      cplx dp = 0.0;
      for (double c : poly) {
        dp = dp * r + p;
        p = p * r + c;
      }
      if (std::abs(dp) == 0.0) break;
      r -= p / dp;
    }
    if (std::abs(r.imag()) < 1e-12 * std::abs(r)) r.imag(0.0);
    roots.push_back(r);
  }

  // Magnitude normalization: |H(j w)|^2 = prod|p|^2 / prod|j w - p|^2 is
  // monotone in w; bisect for the half-power point and rescale it to 1.
  auto gain2 = [&roots](double w) {
    double g = 1.0;
    for (const cplx& p : roots) g *= std::norm(p) / std::norm(cplx(0.0, w) - p);
    return g;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (gain2(hi) > 0.5) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gain2(mid) > 0.5 ? lo : hi) = mid;
  }
  const double w3 = 0.5 * (lo + hi);
  for (cplx& r : roots) r /= w3;
  return roots;
}

IirCoefficients design_bessel(int order, double cutoff_fraction_fs) {
  check_design_args(order, cutoff_fraction_fs);
  return bilinear_lowpass(bessel_prototype_poles(order), cutoff_fraction_fs);
}

cplx frequency_response(const IirCoefficients& coeffs, double f_fraction_fs) {
  const cplx z_inv = std::polar(1.0, -2.0 * std::numbers::pi * f_fraction_fs);
  cplx h = coeffs.overall_gain;
  for (const Biquad& s : coeffs.sections) h *= section_response(s, z_inv);
  return h;
}

double magnitude_db(const IirCoefficients& coeffs, double f_fraction_fs) {
  return 20.0 * std::log10(std::abs(frequency_response(coeffs, f_fraction_fs)));
}

double max_pole_radius(const IirCoefficients& coeffs) {
  double r = 0.0;
  for (const Biquad& s : coeffs.sections) {
    // Roots of z^2 + a1 z + a2.
    const cplx disc = std::sqrt(cplx(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    r = std::max({r, std::abs((-s.a1 + disc) / 2.0), std::abs((-s.a1 - disc) / 2.0)});
  }
  return r;
}

std::vector<double> apply_iir_causal(const IirCoefficients& coeffs, std::span<const double> series) {
  if (series.empty()) return {};
  return run_cascade(coeffs, series, steady_state(coeffs, series.front()));
}

std::size_t zero_phase_padding(const IirCoefficients& coeffs) { return 3 * (2 * coeffs.sections.size() + 1); }

std::vector<double> apply_iir_zero_phase(const IirCoefficients& coeffs, std::span<const double> series) {
  const std::size_t pad = zero_phase_padding(coeffs);
  const std::size_t n = series.size();
  if (n <= pad) {
    throw InsufficientDataError("zero-phase filtering needs more than " + std::to_string(pad) + " samples");
  }
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * series.front() - series[i]);
  ext.insert(ext.end(), series.begin(), series.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * series.back() - series[n - 1 - i]);

  std::vector<double> y = run_cascade(coeffs, ext, steady_state(coeffs, ext.front()));
  std::reverse(y.begin(), y.end());
  y = run_cascade(coeffs, y, steady_state(coeffs, y.front()));
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.end() - static_cast<std::ptrdiff_t>(pad)};
}

std::string coefficients_csv(const IirCoefficients& coeffs) {
  std::ostringstream out;
  out.precision(17);
  out << "section,b0,b1,b2,a1,a2\n";
  for (std::size_t i = 0; i < coeffs.sections.size(); ++i) {
    const Biquad& s = coeffs.sections[i];
    out << i << ',' << s.b0 << ',' << s.b1 << ',' << s.b2 << ',' << s.a1 << ',' << s.a2 << '\n';
  }
  return out.str();
}

}  // namespace cirpeak::filters
