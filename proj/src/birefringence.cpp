#include "ab/birefringence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "ab/error.hpp"

namespace ab {

double eh_lagrangian(const FieldConfiguration& fields, double mass, EhCoefficients coefficients) {
  // Gaussian energy density u [erg/cm^3] maps to u (hbar c)^3 [erg^4].
  const double hbar_c = cgs::hbar * cgs::c;
  const double field_scale = std::pow(hbar_c, 1.5);
  const Eigen::Vector3d e_nat = fields.e_field * field_scale;
  const Eigen::Vector3d b_nat = fields.b_field * field_scale;
  const double mass_energy = mass * cgs::c * cgs::c;
  const double l_nat = eh_lagrangian_natural<double>(e_nat, b_nat, mass_energy, coefficients);
  return l_nat / (hbar_c * hbar_c * hbar_c);
}

namespace {

struct ProbeMode {
  Vec3<long double> e_direction;
  Vec3<long double> b_direction;
};

// Second derivative in the probe amplitude at zero, by central differences.
long double probe_curvature(const Vec3<long double>& e_background,
                            const Vec3<long double>& b_background, const ProbeMode& mode,
                            long double step, EhCoefficients coefficients) {
  auto lagrangian = [&](long double a) {
    return eh_lagrangian_natural<long double>(e_background + a * mode.e_direction,
                                              b_background + a * mode.b_direction, 1.0L,
                                              coefficients);
  };
  return (lagrangian(step) - 2.0L * lagrangian(0.0L) + lagrangian(-step)) / (step * step);
}

}  // namespace

double eh_birefringence_ratio(Background background, EhCoefficients coefficients) {
  using V = Vec3<long double>;
  const long double strength = 1.0L;
  const long double step = std::cbrt(std::numeric_limits<double>::epsilon()) * strength;
  const V z = V::UnitZ();
  const V y = V::UnitY();
  const V zero = V::Zero();

  // Probe travels along x; its magnetic field is x cross (electric field).
  const ProbeMode e_along_z{z, -y};
  const ProbeMode e_along_y{y, z};

  long double parallel = 0.0L;
  long double perpendicular = 0.0L;
  if (background == Background::magnetic) {
    parallel = probe_curvature(zero, strength * z, e_along_z, step, coefficients);
    perpendicular = probe_curvature(zero, strength * z, e_along_y, step, coefficients);
  } else {
    parallel = probe_curvature(strength * z, zero, e_along_y, step, coefficients);
    perpendicular = probe_curvature(strength * z, zero, e_along_z, step, coefficients);
  }
  return static_cast<double>(parallel / perpendicular);
}

double loop_area(const LoopModel& model) {
  if (model.area) {
    if (!(*model.area > 0.0)) throw Error("loop area must be positive");
    return *model.area;
  }
  const double compton = cgs::reduced_compton_length(model.mass);
  return compton * compton;
}

double loop_ab_phase(const LoopModel& model) {
  return cgs::e / (cgs::hbar * cgs::c) * model.field * loop_area(model) * std::sin(model.theta);
}

double orientation_asymmetry(const LoopModel& model) {
  if (model.epsilon) return *model.epsilon;
  const double loop_frequency = model.mass * cgs::c * cgs::c / cgs::hbar;
  const double moment = cgs::e * loop_area(model) * loop_frequency / cgs::c;
  const double interaction = moment * model.field * std::sin(model.theta);
  return interaction / (model.mass * cgs::c * cgs::c);
}

std::complex<double> two_orientation_amplitude(double epsilon, double phase) {
  if (!(std::abs(epsilon) < 1.0)) {
    std::ostringstream msg;
    msg << "model out of range: orientation asymmetry " << epsilon << " must satisfy |epsilon| < 1";
    throw Error(msg.str());
  }
  // w+ e^{i phi} + w- e^{-i phi} with the odd part summed analytically; the
  // direct sum loses everything to cancellation once epsilon phi < 1e-16.
  return {std::cos(phase), epsilon * std::sin(phase)};
}

std::complex<double> two_orientation_amplitude(const LoopModel& model) {
  return two_orientation_amplitude(orientation_asymmetry(model), loop_ab_phase(model));
}

double net_phase(const LoopModel& model) { return std::arg(two_orientation_amplitude(model)); }

double fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error("power-law fit needs two or more points");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(xs.size()), 2);
  Eigen::VectorXd target(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || ys[i] == 0.0) throw Error("power-law fit needs positive x and nonzero y");
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = std::log(xs[i]);
    design(row, 1) = 1.0;
    target(row) = std::log(std::abs(ys[i]));
  }
  const Eigen::Vector2d solution = design.colPivHouseholderQr().solve(target);
  return solution(0);
}

namespace {

ScalingFit scaling_fit(const LoopModel& base, std::span<const double> grid, bool vary_mass) {
  if (grid.size() < 2) throw Error("scaling fit needs at least two grid points");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw Error("scaling grid must be positive and span at least two decades");
  }
  ScalingFit fit;
  for (double value : grid) {
    LoopModel model = base;
    (vary_mass ? model.mass : model.field) = value;
    const double phase = loop_ab_phase(model);
    const double epsilon = orientation_asymmetry(model);
    if (std::abs(phase) > kSmallLoopRegime || std::abs(epsilon) > kSmallLoopRegime) {
      std::ostringstream msg;
      msg << "regime violation at " << (vary_mass ? "mass " : "B ") << value << ": loop phase "
          << phase << ", asymmetry " << epsilon;
      throw Error(msg.str());
    }
    fit.parameters.push_back(value);
    fit.net_phases.push_back(net_phase(model));
  }
  const bool all_zero = std::all_of(fit.net_phases.begin(), fit.net_phases.end(),
                                    [](double p) { return p == 0.0; });
  if (!all_zero) fit.exponent = fit_power_law(fit.parameters, fit.net_phases);
  return fit;
}

}  // namespace

ScalingFit net_phase_scaling(const LoopModel& base, std::span<const double> fields) {
  return scaling_fit(base, fields, false);
}

ScalingFit net_phase_mass_scaling(const LoopModel& base, std::span<const double> masses) {
  return scaling_fit(base, masses, true);
}

}  // namespace ab
