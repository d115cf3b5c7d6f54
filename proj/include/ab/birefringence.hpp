#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ab/constants.hpp"

namespace ab {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// Weights of the two field invariants in the quartic Lagrangian. The default
/// is the Euler-Heisenberg pair (1, 7).
struct EhCoefficients {
  double invariant_square = 1.0;  // (E^2 - B^2)^2
  double pseudoscalar = 7.0;      // (E . B)^2
};

// L = 2 a^2 / (45 (4 pi)^2 m^4) [c1 (E^2 - B^2)^2 + c2 (E . B)^2]
// in Gaussian units with hbar = c = 1; fields in energy^2, mass in energy.
template <typename Scalar>
Scalar eh_lagrangian_natural(const Vec3<Scalar>& e_field, const Vec3<Scalar>& b_field, Scalar mass,
                             EhCoefficients coefficients = {},
                             Scalar fine_structure = Scalar(cgs::fine_structure)) {
  const Scalar four_pi = Scalar(4) * Scalar(cgs::pi);
  const Scalar m2 = mass * mass;
  const Scalar prefactor =
      Scalar(2) * fine_structure * fine_structure / (Scalar(45) * four_pi * four_pi * m2 * m2);
  const Scalar first = e_field.squaredNorm() - b_field.squaredNorm();
  const Scalar second = e_field.dot(b_field);
  return prefactor * (Scalar(coefficients.invariant_square) * first * first +
                      Scalar(coefficients.pseudoscalar) * second * second);
}

struct FieldConfiguration {
  Eigen::Vector3d e_field = Eigen::Vector3d::Zero();  // statvolt / cm
  Eigen::Vector3d b_field = Eigen::Vector3d::Zero();  // gauss
};

// Effective Lagrangian density in erg / cm^3 for CGS fields; converts to
// natural units, evaluates, converts back.
double eh_lagrangian(const FieldConfiguration& fields, double mass = cgs::electron_mass,
                     EhCoefficients coefficients = {});

enum class Background { magnetic, electric };

// (n_par - 1) / (n_perp - 1) for a probe crossing a strong background field,
// from central second differences of the Lagrangian in the probe amplitude.
// "Parallel" means the probe field of the other type (E for a magnetic
// background) lies along the background.
double eh_birefringence_ratio(Background background = Background::magnetic,
                              EhCoefficients coefficients = {});

/// Virtual pair loop in a uniform field.
struct LoopModel {
  double mass = cgs::electron_mass;  // g
  double field = 0.0;                // gauss
  double theta = cgs::pi / 2.0;      // angle between loop plane and B, rad
  std::optional<double> area;        // cm^2; default (hbar / m c)^2
  std::optional<double> epsilon;     // overrides the moment-weighting asymmetry
};

double loop_area(const LoopModel& model);

// (e / hbar c) B A sin(theta)
double loop_ab_phase(const LoopModel& model);

// U / m c^2 with U = mu . B and mu = e A (m c^2 / hbar) / c the loop moment.
double orientation_asymmetry(const LoopModel& model);

// w+ e^{i phi} + w- e^{-i phi}, w_pm = (1 pm epsilon)/2. Requires |epsilon| < 1.
std::complex<double> two_orientation_amplitude(const LoopModel& model);
std::complex<double> two_orientation_amplitude(double epsilon, double phase);

// arg of the two-orientation amplitude.
double net_phase(const LoopModel& model);

struct ScalingFit {
  std::vector<double> parameters;
  std::vector<double> net_phases;
  // Log-log slope; empty when every net phase vanishes.
  std::optional<double> exponent;
};

// Loop phase and asymmetry must stay at or below this everywhere on a grid.
inline constexpr double kSmallLoopRegime = 0.1;

// Fits |net phase| ~ B^p over the given fields (at least two decades).
ScalingFit net_phase_scaling(const LoopModel& base, std::span<const double> fields);
// Same fit over particle masses; the loop area follows the mass unless fixed.
ScalingFit net_phase_mass_scaling(const LoopModel& base, std::span<const double> masses);

// Least-squares slope of log|y| against log x.
double fit_power_law(std::span<const double> xs, std::span<const double> ys);

}  // namespace ab
