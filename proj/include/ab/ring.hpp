#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "ab/constants.hpp"

namespace ab {

/// Charged condensate on a narrow ring of radius R threaded by beta flux
/// quanta, driven by circularly polarized light along the ring axis.
/// Gaussian CGS throughout.
struct RingParams {
  double radius = 1e-4;             // cm
  double beta = 1.0;                // flux / (hc/e)
  int particle_count = 1;           // N
  double n_density = 0.0;           // particles per cm, N / (2 pi R)
  double mass = cgs::electron_mass;  // g
  double charge = cgs::e;           // esu
  double omega = 0.0;               // rad/s
  double lambda_bar = 0.0;          // cm; k = 1 / lambda_bar

  // Fills n_density and lambda_bar = c / omega.
  static RingParams with_frequency(double radius, double beta, int particle_count, double omega,
                                   double mass = cgs::electron_mass, double charge = cgs::e);
  // Fills n_density and omega = c / lambda_bar.
  static RingParams with_wavelength(double radius, double beta, int particle_count,
                                    double lambda_bar, double mass = cgs::electron_mass,
                                    double charge = cgs::e);
};

void validate(const RingParams& params);

// hbar / (2 m R^2)
double omega0(const RingParams& params);

struct CircularPair {
  std::complex<double> plus;
  std::complex<double> minus;
};

// S_pm = (1/sqrt2)(e R / c) beta w0 / (beta w0 pm w), per unit incident A_pm.
CircularPair response_coefficients(const RingParams& params);
// J_pm = pm i (n e^2 / m c)(w / (w mp beta w0)) / sqrt2, per unit A_pm.
CircularPair ring_currents(const RingParams& params);
// f_pm = (N/2) r0 w / (w mp beta w0), r0 = e^2 / m c^2.
CircularPair forward_amplitude(const RingParams& params);

// The forward amplitudes and the printed dimensionless S matrix carry opposite
// signs in the beta w0 term and differ by a factor 2 at N = 1.
enum class SMatrixConvention {
  from_amplitude,  // S_pm = 1 + i f_pm k
  as_printed,      // S_pm = 1 + i N r0 k w / (w pm beta w0)
};

CircularPair s_matrix(const RingParams& params,
                      SMatrixConvention convention = SMatrixConvention::from_amplitude);

// Phase advance of the component whose denominator is (w - beta w0) over the
// one with (w + beta w0). Evaluated without cancellation.
double s_matrix_phase_difference(const RingParams& params, SMatrixConvention convention);

// Rotation angle taken as the full S-matrix phase difference. With the printed
// convention and N = 1 this reproduces the closed form below.
double faraday_rotation(const RingParams& params,
                        SMatrixConvention convention = SMatrixConvention::as_printed);

// r0 beta hbar / (m c R^2); requires N = 1.
double faraday_rotation_closed_form(const RingParams& params);

struct ResponseResult {
  double omega0 = 0.0;
  CircularPair s;        // response coefficients
  CircularPair j;        // current densities
  CircularPair f;        // forward amplitudes, cm
  CircularPair smatrix;  // dimensionless S matrix
  double delta_theta = 0.0;
  std::optional<double> delta_theta_closed_form;  // N = 1 only
};

ResponseResult ring_response(const RingParams& params,
                             SMatrixConvention convention = SMatrixConvention::as_printed);

template <typename Scalar>
Scalar zeeman_level(Scalar m, Scalar alpha, Scalar unit_energy) {
  const Scalar shifted = m - alpha;
  return unit_energy * shifted * shifted;
}

/// Single-channel ring spectrum E_m = hbar^2 (m - alpha)^2 / (2 mass R^2).
struct ZeemanSpectrum {
  double alpha = 0.0;
  std::map<int, double> levels;  // erg
  int ground_m = 0;              // smallest m among degenerate ground levels
  double ground_energy = 0.0;
  std::vector<int> ground_levels;  // every m within 1e-12 relative of the minimum
};

ZeemanSpectrum ab_zeeman_spectrum(double alpha, int m_range, const RingParams& ring);

}  // namespace ab
