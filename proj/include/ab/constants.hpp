#pragma once

#include <numbers>

// Gaussian CGS physical constants (CODATA 2018).
namespace ab::cgs {

inline constexpr double hbar = 1.054571817e-27;            // erg s
inline constexpr double c = 2.99792458e10;                 // cm / s
inline constexpr double e = 4.803204712570263e-10;         // esu
inline constexpr double electron_mass = 9.1093837015e-28;  // g
inline constexpr double proton_mass = 1.67262192369e-24;   // g
inline constexpr double muon_mass = 1.883531627e-25;       // g
inline constexpr double fine_structure = 7.2973525693e-3;

inline constexpr double pi = std::numbers::pi;

// e^2 / (m c^2)
inline constexpr double classical_radius(double mass) { return e * e / (mass * c * c); }

// hbar / (m c)
inline constexpr double reduced_compton_length(double mass) { return hbar / (mass * c); }

}  // namespace ab::cgs
