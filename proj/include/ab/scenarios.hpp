#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ab/fock.hpp"
#include "ab/geometry.hpp"

namespace ab {

struct LabeledPath {
  std::string label;  // the mode the particle occupies along this branch
  ParticlePath path;
};

/// Output of one interferometer pipeline.
struct ScenarioResult {
  FockState final_state;
  double postselection_probability = 0.0;
  // arg(second ket) - arg(first ket) in (-pi, pi]; empty when the output is not
  // a two-ket superposition.
  std::optional<double> relative_phase;
  std::optional<std::pair<Occupation, Occupation>> phase_kets;
  GaugeChoice gauge_used;
  // AB phase collected by each charged branch, keyed by mode name.
  std::map<std::string, double> branch_phases;
  std::vector<LabeledPath> particle_paths;
  std::vector<Fluxon> fluxons;
};

// Electron enters from above, hole from below; each splits into left- and
// right-moving quarter arcs around a fluxon at the origin and the pair may
// annihilate into photon mode gL at (-1,0) or gR at (1,0). The postselected
// output is (|1_L 0_R> + e^{2 pi i alpha}|0_L 1_R>)/sqrt2 with probability 1/2.
ScenarioResult run_pair_half_loop(double alpha, const GaugeChoice& gauge = SubtendedAngleGauge{});

// Atom modes atomL, atomR; |e,g> means atomL excited.
RegistryPtr atom_registry();
// (|e,g> + e^{i phase}|g,e>)/sqrt2
FockState atom_bell_state(double phase);

// Maps the two photon kets of a two-ket result onto atom excitations.
FockState transfer_to_atoms(const ScenarioResult& result);

struct EncodedBit {
  double alpha = 0.0;
  FockState target_state;
};

// 0 -> (alpha 0, psi+), 1 -> (alpha 1/2, psi-).
EncodedBit encode_bit(int bit);

inline constexpr int kMinPairs = 2;
inline constexpr int kMaxPairs = 4;

// n electrons and n holes on 2n arms at angles (k + 1/2) pi / n, alternating
// electron/hole; photon arm p (1-based) sits at angle p pi / n. Output is
// (|1010...> + e^{2 pi i alpha}|0101...>)/sqrt2 over the photon arms.
ScenarioResult run_n_pair(int n, double alpha, const GaugeChoice& gauge = SubtendedAngleGauge{});

struct DetectionProbabilities {
  double p_bright = 0.0;
  double p_dark = 0.0;
};

// Mach-Zehnder interferometer whose upper arm converts the photon into an
// electron-hole pair that passes on both sides of the fluxon and recombines.
// p_bright = (1 + cos(2 pi alpha + extra_phase)) / 2.
DetectionProbabilities run_mz_photon(double alpha, double extra_phase = 0.0,
                                     const GaugeChoice& gauge = SubtendedAngleGauge{});
ScenarioResult run_mz_photon_detailed(double alpha, double extra_phase = 0.0,
                                      const GaugeChoice& gauge = SubtendedAngleGauge{});
DetectionProbabilities mz_probabilities(const ScenarioResult& result);

using JonesVector = Eigen::Vector2cd;

// Circular basis with e^{i(kz - wt)} and the receiver's handedness:
// right = (x - i y)/sqrt2, left = (x + i y)/sqrt2.
JonesVector right_circular();
JonesVector left_circular();

// Right-circular light makes the X+ exciton, left-circular the X- exciton, and
// the two collect opposite flux phases +/- 2 pi alpha. A linear input turns by
// 2 pi alpha.
JonesVector exciton_polarization_rotation(double alpha, const JonesVector& input);

// Winding of every closed sub-loop of one particle's trajectory, plus the
// winding of the trajectory closed by the chord between its endpoints when
// that chord avoids the fluxon.
struct LoopCheck {
  std::string particle;
  std::string fluxon;
  std::vector<int> subloop_windings;
  std::optional<int> chord_winding;
};

struct LooplessCertificate {
  std::vector<LoopCheck> checks;
  // True when no single trajectory closes a loop around any fluxon.
  bool holds() const;
};

LooplessCertificate loopless_certificate(const ScenarioResult& result);

// Picks the first and second ket of a two-term state in descending
// lexicographic occupation order, so |10> precedes |01>.
std::optional<std::pair<Occupation, Occupation>> ordered_ket_pair(const FockState& state);

}  // namespace ab
