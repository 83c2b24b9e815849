#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace cirpeak::filters {

/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
/// A first-order stage is stored with b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
};

/// Cascade of second-order sections. Each section is normalized to unit DC
/// gain, so overall_gain is 1 for the lowpass designs below.
struct IirCoefficients {
  std::vector<Biquad> sections;
  double overall_gain = 1.0;
};

/// Lowpass Butterworth of `order` with -3.01 dB at cutoff_fraction_fs * Fs.
/// Prewarped bilinear transform of the analog prototype poles
/// exp(j*pi*(2m + n - 1) / (2n)), m = 1..n.
IirCoefficients design_butterworth(int order, double cutoff_fraction_fs);

/// Reversed Bessel polynomial coefficients, highest power first
/// (order 4: 1, 10, 45, 105, 105).
std::vector<double> bessel_polynomial(int order);

/// Roots of the reversed Bessel polynomial scaled so the prototype's
/// magnitude response is -3.01 dB at 1 rad/s.
std::vector<std::complex<double>> bessel_prototype_poles(int order);

/// Lowpass Bessel/Thomson (order <= 25), magnitude normalized to -3.01 dB at
/// the cutoff, bilinear transformed with prewarping.
IirCoefficients design_bessel(int order, double cutoff_fraction_fs);

/// Response at frequency f given as a fraction of the sampling rate.
std::complex<double> frequency_response(const IirCoefficients& coeffs, double f_fraction_fs);
double magnitude_db(const IirCoefficients& coeffs, double f_fraction_fs);

/// Largest pole radius over all sections.
double max_pole_radius(const IirCoefficients& coeffs);

/// Causal cascade with steady-state initial conditions for series[0]
/// (constants pass through without a startup transient).
std::vector<double> apply_iir_causal(const IirCoefficients& coeffs, std::span<const double> series);

/// Padding length used by apply_iir_zero_phase: 3 * (2 * sections + 1).
std::size_t zero_phase_padding(const IirCoefficients& coeffs);

/// Forward-backward filtering with odd edge extension of
/// zero_phase_padding() samples and steady-state initial conditions.
/// Throws InsufficientDataError when the series is not longer than the
/// padding.
std::vector<double> apply_iir_zero_phase(const IirCoefficients& coeffs, std::span<const double> series);

/// `section,b0,b1,b2,a1,a2`
std::string coefficients_csv(const IirCoefficients& coeffs);

}  // namespace cirpeak::filters
