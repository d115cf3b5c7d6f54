#include "ab/ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ab/error.hpp"

namespace ab {

namespace {

using cplx = std::complex<double>;

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

double flux_frequency(const RingParams& p) { return p.beta * omega0(p); }

void check_resonance(const RingParams& p) {
  const double bw = std::abs(flux_frequency(p));
  if (std::abs(p.omega - bw) <= 1e-12 * std::max(p.omega, bw)) {
    std::ostringstream msg;
    msg << "resonant denominator: omega = " << p.omega << " rad/s equals |beta| omega0";
    throw Error(msg.str());
  }
}

double classical_radius(const RingParams& p) {
  return p.charge * p.charge / (p.mass * cgs::c * cgs::c);
}

}  // namespace

RingParams RingParams::with_frequency(double radius, double beta, int particle_count, double omega,
                                      double mass, double charge) {
  RingParams p;
  p.radius = radius;
  p.beta = beta;
  p.particle_count = particle_count;
  p.n_density = particle_count / (2.0 * cgs::pi * radius);
  p.mass = mass;
  p.charge = charge;
  p.omega = omega;
  p.lambda_bar = cgs::c / omega;
  return p;
}

RingParams RingParams::with_wavelength(double radius, double beta, int particle_count,
                                       double lambda_bar, double mass, double charge) {
  RingParams p = with_frequency(radius, beta, particle_count, cgs::c / lambda_bar, mass, charge);
  p.lambda_bar = lambda_bar;
  return p;
}

void validate(const RingParams& p) {
  if (!(p.radius > 0.0) || !std::isfinite(p.radius)) throw Error("ring radius must be positive");
  if (p.particle_count < 1) throw Error("ring particle count N must be >= 1");
  if (!(p.mass > 0.0)) throw Error("particle mass must be positive");
  if (!(p.omega > 0.0) || !std::isfinite(p.omega)) throw Error("omega must be positive");
  if (!(p.lambda_bar > 0.0)) throw Error("lambda_bar must be positive");
  if (!std::isfinite(p.beta)) throw Error("beta must be finite");
  const double expected = p.particle_count;
  if (std::abs(p.n_density * 2.0 * cgs::pi * p.radius - expected) > 1e-9 * expected) {
    throw Error("n_density * 2 pi R must equal N");
  }
}

double omega0(const RingParams& p) {
  validate(p);
  return cgs::hbar / (2.0 * p.mass * p.radius * p.radius);
}

CircularPair response_coefficients(const RingParams& p) {
  validate(p);
  check_resonance(p);
  const double bw = flux_frequency(p);
  const double prefactor = kInvSqrt2 * p.charge * p.radius / cgs::c;
  return {cplx(prefactor * bw / (bw + p.omega), 0.0), cplx(prefactor * bw / (bw - p.omega), 0.0)};
}

CircularPair ring_currents(const RingParams& p) {
  validate(p);
  check_resonance(p);
  const double bw = flux_frequency(p);
  const double prefactor = kInvSqrt2 * p.n_density * p.charge * p.charge / (p.mass * cgs::c);
  return {cplx(0.0, prefactor * p.omega / (p.omega - bw)),
          cplx(0.0, -prefactor * p.omega / (p.omega + bw))};
}

CircularPair forward_amplitude(const RingParams& p) {
  validate(p);
  check_resonance(p);
  const double bw = flux_frequency(p);
  const double scale = 0.5 * p.particle_count * classical_radius(p);
  return {cplx(scale * p.omega / (p.omega - bw), 0.0), cplx(scale * p.omega / (p.omega + bw), 0.0)};
}

CircularPair s_matrix(const RingParams& p, SMatrixConvention convention) {
  const double k = 1.0 / p.lambda_bar;
  if (convention == SMatrixConvention::from_amplitude) {
    const CircularPair f = forward_amplitude(p);
    return {1.0 + cplx(0.0, 1.0) * f.plus * k, 1.0 + cplx(0.0, 1.0) * f.minus * k};
  }
  validate(p);
  check_resonance(p);
  const double bw = flux_frequency(p);
  const double scale = p.particle_count * classical_radius(p) * k * p.omega;
  return {cplx(1.0, scale / (p.omega + bw)), cplx(1.0, scale / (p.omega - bw))};
}

double s_matrix_phase_difference(const RingParams& p, SMatrixConvention convention) {
  const CircularPair s = s_matrix(p, convention);
  const double bw = flux_frequency(p);
  const double k = 1.0 / p.lambda_bar;
  // Both conventions put x_slow = c_N r0 k w / (w - beta w0) and
  // x_fast = c_N r0 k w / (w + beta w0) on the imaginary axis.
  const double c_n = convention == SMatrixConvention::from_amplitude ? 0.5 * p.particle_count
                                                                      : 1.0 * p.particle_count;
  const double difference =
      c_n * classical_radius(p) * k * p.omega * 2.0 * bw / ((p.omega - bw) * (p.omega + bw));
  const double slow = convention == SMatrixConvention::from_amplitude ? s.plus.imag() : s.minus.imag();
  const double fast = convention == SMatrixConvention::from_amplitude ? s.minus.imag() : s.plus.imag();
  // arg(1 + i x_slow) - arg(1 + i x_fast) = atan2(x_slow - x_fast, 1 + x_slow x_fast)
  return std::atan2(difference, 1.0 + slow * fast);
}

double faraday_rotation(const RingParams& p, SMatrixConvention convention) {
  return s_matrix_phase_difference(p, convention);
}

double faraday_rotation_closed_form(const RingParams& p) {
  validate(p);
  if (p.particle_count != 1) throw Error("closed-form rotation angle requires N = 1");
  return classical_radius(p) * p.beta * cgs::hbar / (p.mass * cgs::c * p.radius * p.radius);
}

ResponseResult ring_response(const RingParams& p, SMatrixConvention convention) {
  ResponseResult out;
  out.omega0 = omega0(p);
  out.s = response_coefficients(p);
  out.j = ring_currents(p);
  out.f = forward_amplitude(p);
  out.smatrix = s_matrix(p, convention);
  out.delta_theta = faraday_rotation(p, convention);
  if (p.particle_count == 1) out.delta_theta_closed_form = faraday_rotation_closed_form(p);
  return out;
}

ZeemanSpectrum ab_zeeman_spectrum(double alpha, int m_range, const RingParams& ring) {
  if (m_range < 2) throw Error("m_range must be >= 2");
  if (!std::isfinite(alpha)) throw Error("alpha must be finite");
  if (!(ring.radius > 0.0) || !(ring.mass > 0.0)) throw Error("ring radius and mass must be positive");
  const double unit = cgs::hbar * cgs::hbar / (2.0 * ring.mass * ring.radius * ring.radius);

  ZeemanSpectrum spectrum;
  spectrum.alpha = alpha;
  spectrum.ground_energy = std::numeric_limits<double>::infinity();
  for (int m = -m_range; m <= m_range; ++m) {
    const double energy = zeeman_level<double>(m, alpha, unit);
    spectrum.levels.emplace(m, energy);
    spectrum.ground_energy = std::min(spectrum.ground_energy, energy);
  }
  for (const auto& [m, energy] : spectrum.levels) {
    if (energy - spectrum.ground_energy <= 1e-12 * unit) spectrum.ground_levels.push_back(m);
  }
  spectrum.ground_m = spectrum.ground_levels.front();
  return spectrum;
}

}  // namespace ab
