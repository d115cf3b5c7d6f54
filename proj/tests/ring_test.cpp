#include <doctest.h>

#include <cmath>

#include "ab/error.hpp"
#include "ab/ring.hpp"

using namespace ab;

namespace {

// Independent arithmetic: r0 beta hbar / (m c R^2) with CODATA constants.
double closed_form_oracle(double radius, double beta) {
  const double e = 4.803204712570263e-10, m = 9.1093837015e-28, c = 2.99792458e10;
  const double hbar = 1.054571817e-27;
  return (e * e / (m * c * c)) * beta * hbar / (m * c * radius * radius);
}

}  // namespace

TEST_CASE("omega0 for the reference ring") {
  const RingParams p = RingParams::with_wavelength(1e-4, 1.0, 1, 1e-4);
  CHECK(omega0(p) == doctest::Approx(1.054571817e-27 / (2.0 * 9.1093837015e-28 * 1e-8)));
  CHECK(omega0(p) == doctest::Approx(5.788e7).epsilon(1e-3));
}

TEST_CASE("Faraday rotation of the reference ring is of order 1e-15") {
  const RingParams p = RingParams::with_wavelength(1e-4, 1.0, 1, 1e-4);
  const double rotation = faraday_rotation(p);
  CHECK(rotation > 0.5e-15);
  CHECK(rotation < 2e-15);
  CHECK(faraday_rotation_closed_form(p) == doctest::Approx(closed_form_oracle(1e-4, 1.0)).epsilon(1e-12));
  CHECK(rotation == doctest::Approx(closed_form_oracle(1e-4, 1.0)).epsilon(1e-3));
}

TEST_CASE("no flux, no rotation, and the response is odd in beta") {
  RingParams p = RingParams::with_wavelength(1e-4, 0.0, 1, 1e-4);
  CHECK(faraday_rotation(p) == 0.0);
  CHECK(response_coefficients(p).plus == std::complex<double>(0.0, 0.0));
  p.beta = 0.4;
  const double forward = faraday_rotation(p);
  p.beta = -0.4;
  CHECK(faraday_rotation(p) == doctest::Approx(-forward));
}

TEST_CASE("response formulas against direct evaluation") {
  const RingParams p = RingParams::with_frequency(2e-4, 0.3, 3, 7.0e8);
  const double w0 = omega0(p), bw = 0.3 * w0, w = 7.0e8;
  const double e = p.charge, m = p.mass, c = 2.99792458e10, r = 2e-4;
  const double r0 = e * e / (m * c * c);
  const CircularPair s = response_coefficients(p);
  CHECK(s.plus.real() == doctest::Approx(std::sqrt(0.5) * e * r / c * bw / (bw + w)));
  CHECK(s.minus.real() == doctest::Approx(std::sqrt(0.5) * e * r / c * bw / (bw - w)));
  const CircularPair j = ring_currents(p);
  const double n = 3.0 / (2.0 * 3.141592653589793 * r);
  CHECK(j.plus.imag() == doctest::Approx(std::sqrt(0.5) * n * e * e / (m * c) * w / (w - bw)));
  CHECK(j.minus.imag() == doctest::Approx(-std::sqrt(0.5) * n * e * e / (m * c) * w / (w + bw)));
  const CircularPair f = forward_amplitude(p);
  CHECK(f.plus.real() == doctest::Approx(1.5 * r0 * w / (w - bw)));
  CHECK(f.minus.real() == doctest::Approx(1.5 * r0 * w / (w + bw)));
  const double k = w / c;
  const CircularPair sa = s_matrix(p, SMatrixConvention::from_amplitude);
  CHECK(sa.plus.imag() == doctest::Approx(f.plus.real() * k));
  const CircularPair sp = s_matrix(p, SMatrixConvention::as_printed);
  CHECK(sp.plus.imag() == doctest::Approx(3.0 * r0 * k * w / (w + bw)));
  CHECK(sp.minus.imag() == doctest::Approx(3.0 * r0 * k * w / (w - bw)));
}

TEST_CASE("phase difference matches arg difference") {
  const RingParams p = RingParams::with_frequency(1e-5, 0.5, 1, 1e9);
  for (auto conv : {SMatrixConvention::from_amplitude, SMatrixConvention::as_printed}) {
    const CircularPair s = s_matrix(p, conv);
    const double direct = conv == SMatrixConvention::from_amplitude
                              ? std::arg(s.plus) - std::arg(s.minus)
                              : std::arg(s.minus) - std::arg(s.plus);
    CHECK(s_matrix_phase_difference(p, conv) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("closed form and S-matrix agree within 1% across the grid") {
  for (double beta = 0.1; beta < 0.95; beta += 0.1) {
    for (int decade = 1; decade <= 6; ++decade) {
      RingParams p = RingParams::with_wavelength(1e-4, beta, 1, 1e-4);
      p = RingParams::with_frequency(1e-4, beta, 1, std::pow(10.0, decade) * omega0(p));
      const double closed = faraday_rotation_closed_form(p);
      CHECK(std::abs(faraday_rotation(p) - closed) <= 0.01 * closed);
    }
  }
}

TEST_CASE("resonance and bad parameters are errors") {
  RingParams p = RingParams::with_wavelength(1e-4, 1.0, 1, 1e-4);
  p = RingParams::with_frequency(1e-4, 1.0, 1, omega0(p));
  CHECK_THROWS_WITH_AS(ring_response(p), doctest::Contains("resonant"), Error);
  CHECK_THROWS_AS(omega0(RingParams::with_wavelength(-1.0, 1.0, 1, 1e-4)), Error);
  CHECK_THROWS_AS(omega0(RingParams::with_wavelength(1e-4, 1.0, 0, 1e-4)), Error);
  RingParams multi = RingParams::with_wavelength(1e-4, 1.0, 2, 1e-4);
  CHECK_THROWS_AS(faraday_rotation_closed_form(multi), Error);
  CHECK_FALSE(ring_response(multi).delta_theta_closed_form.has_value());
}

TEST_CASE("AB-Zeeman spectrum") {
  const RingParams ring;
  const double unit = 1.054571817e-27 * 1.054571817e-27 / (2.0 * ring.mass * ring.radius * ring.radius);
  const ZeemanSpectrum zero = ab_zeeman_spectrum(0.0, 5, ring);
  CHECK(zero.ground_m == 0);
  CHECK(zero.ground_energy == 0.0);
  const ZeemanSpectrum half = ab_zeeman_spectrum(0.5, 5, ring);
  CHECK(half.ground_levels == std::vector<int>{0, 1});
  CHECK(half.ground_energy == doctest::Approx(0.25 * unit));
  CHECK(ab_zeeman_spectrum(0.7, 5, ring).ground_m == 1);
  CHECK(ab_zeeman_spectrum(-0.7, 5, ring).ground_m == -1);
  CHECK(ab_zeeman_spectrum(0.3, 5, ring).ground_energy ==
        doctest::Approx(ab_zeeman_spectrum(1.3, 5, ring).ground_energy).epsilon(1e-12));
  CHECK(ab_zeeman_spectrum(0.3, 5, ring).ground_energy ==
        doctest::Approx(ab_zeeman_spectrum(-0.3, 5, ring).ground_energy).epsilon(1e-12));
  CHECK_THROWS_AS(ab_zeeman_spectrum(0.0, 1, ring), Error);
  CHECK(zeeman_level<long double>(2.0L, 0.5L, 1.0L) == 2.25L);
}
