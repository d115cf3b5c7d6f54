#include "ab/scenarios.hpp"

#include <cmath>
#include <numbers>

#include "ab/error.hpp"

namespace ab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kArcSegments = 4;

struct ArmModes {
  std::string ccw;
  std::string cw;
  ModeKind kind = ModeKind::electron;
  bool inject_cw = false;
};

// Charged particles sit on the unit circle around a fluxon at the origin; each
// one is split into a clockwise and a counter-clockwise branch that meets the
// neighbouring particle's opposite branch at a photon channel.
struct RingLayout {
  int n = 1;
  std::vector<ArmModes> arms;            // index j = 0 .. 2n-1
  std::vector<std::string> photon_arms;  // index p-1, p = 1 .. 2n
  RegistryPtr registry;
};

double arm_angle(int n, int j) { return (j + 0.5) * kPi / n; }

ParticlePath branch_path(int n, int j, bool clockwise, ModeKind kind) {
  const double from = arm_angle(n, j);
  const double to = from + (clockwise ? -1.0 : 1.0) * kPi / (2.0 * n);
  return ParticlePath{kind == ModeKind::electron ? -1 : 1,
                      arc_points(Point::Zero(), 1.0, from, to, kArcSegments)};
}

ScenarioResult run_ring_layout(const RingLayout& layout, double alpha, const GaugeChoice& gauge) {
  const int n = layout.n;
  const int arms = 2 * n;
  const std::vector<Fluxon> fluxons{Fluxon{"F", Point::Zero(), alpha}};
  const ModeRegistry& registry = *layout.registry;

  ScenarioResult result{zero_state(layout.registry), 0.0, std::nullopt, std::nullopt, gauge,
                        {}, {}, fluxons};

  Occupation initial(registry.size(), 0);
  for (const ArmModes& arm : layout.arms) {
    initial[registry.index_of(arm.inject_cw ? arm.cw : arm.ccw)] = 1;
  }
  FockState state = new_state(layout.registry, initial);
  for (const ArmModes& arm : layout.arms) {
    state = arm.inject_cw ? beam_splitter(state, arm.cw, arm.ccw)
                          : beam_splitter(state, arm.ccw, arm.cw);
  }

  for (int j = 0; j < arms; ++j) {
    const ArmModes& arm = layout.arms[static_cast<std::size_t>(j)];
    for (bool clockwise : {false, true}) {
      ParticlePath path = branch_path(n, j, clockwise, arm.kind);
      const std::string& label = clockwise ? arm.cw : arm.ccw;
      result.branch_phases[label] = ab_phase(path, fluxons, gauge);
      result.particle_paths.push_back({label, std::move(path)});
    }
  }

  // Photon arm p sits at channel c = p mod 2n. There the clockwise branch of
  // arm c meets the counter-clockwise branch of arm c-1.
  for (int p = 1; p <= arms; ++p) {
    const int c = p % arms;
    const ArmModes& cw_arm = layout.arms[static_cast<std::size_t>(c)];
    const ArmModes& ccw_arm = layout.arms[static_cast<std::size_t>((c + arms - 1) % arms)];
    const std::string& cw_mode = cw_arm.cw;
    const std::string& ccw_mode = ccw_arm.ccw;
    const bool cw_is_electron = cw_arm.kind == ModeKind::electron;
    const std::string& e_mode = cw_is_electron ? cw_mode : ccw_mode;
    const std::string& h_mode = cw_is_electron ? ccw_mode : cw_mode;
    const double phase = result.branch_phases.at(e_mode) + result.branch_phases.at(h_mode);
    state = pair_recombine(state, e_mode, h_mode, layout.photon_arms[static_cast<std::size_t>(p - 1)],
                           VertexPhase{phase});
  }

  Postselection selected = postselect(state, no_charged_particles(registry));
  result.final_state = selected.state;
  result.postselection_probability = selected.probability;

  Occupation odd(registry.size(), 0);
  Occupation even(registry.size(), 0);
  for (int p = 1; p <= arms; ++p) {
    const std::size_t index = registry.index_of(layout.photon_arms[static_cast<std::size_t>(p - 1)]);
    (p % 2 == 1 ? odd : even)[index] = 1;
  }
  result.phase_kets = std::make_pair(odd, even);
  result.relative_phase = relative_phase(result.final_state, odd, even);
  return result;
}

RingLayout half_loop_layout() {
  RingLayout layout;
  layout.n = 1;
  // Arm 0 (top) carries the electron, arm 1 (bottom) the hole. Counter-clockwise
  // from the top leads to the left recombination point.
  layout.arms = {ArmModes{"eL", "eR", ModeKind::electron, false},
                 ArmModes{"hR", "hL", ModeKind::hole, false}};
  layout.photon_arms = {"gL", "gR"};
  layout.registry = make_registry({{"eL", ModeKind::electron, 1},
                                   {"eR", ModeKind::electron, 1},
                                   {"hL", ModeKind::hole, 1},
                                   {"hR", ModeKind::hole, 1},
                                   {"gL", ModeKind::photon, 1},
                                   {"gR", ModeKind::photon, 1}});
  return layout;
}

RingLayout n_pair_layout(int n) {
  RingLayout layout;
  layout.n = n;
  std::vector<Mode> modes;
  for (int j = 0; j < 2 * n; ++j) {
    const bool electron = j % 2 == 0;
    const std::string base = (electron ? "e" : "h") + std::to_string(j);
    ArmModes arm{base + "_ccw", base + "_cw", electron ? ModeKind::electron : ModeKind::hole, false};
    // Exchanging which electron pairs with which hole between the two
    // recombination patterns costs a fermionic sign (-1)^(n-1). For even n one
    // hole enters through the other splitter port, which cancels it.
    if (n % 2 == 0 && j == 2 * n - 1) arm.inject_cw = true;
    modes.push_back({arm.ccw, arm.kind, 1});
    modes.push_back({arm.cw, arm.kind, 1});
    layout.arms.push_back(std::move(arm));
  }
  for (int p = 1; p <= 2 * n; ++p) {
    layout.photon_arms.push_back("g" + std::to_string(p));
    modes.push_back({layout.photon_arms.back(), ModeKind::photon, 1});
  }
  layout.registry = make_registry(std::move(modes));
  return layout;
}

}  // namespace

ScenarioResult run_pair_half_loop(double alpha, const GaugeChoice& gauge) {
  static const RingLayout layout = half_loop_layout();
  return run_ring_layout(layout, alpha, gauge);
}

ScenarioResult run_n_pair(int n, double alpha, const GaugeChoice& gauge) {
  if (n < kMinPairs || n > kMaxPairs) {
    throw Error("run_n_pair: n = " + std::to_string(n) + " outside [2, 4]");
  }
  return run_ring_layout(n_pair_layout(n), alpha, gauge);
}

RegistryPtr atom_registry() {
  static const RegistryPtr registry =
      make_registry({{"atomL", ModeKind::atom, 1}, {"atomR", ModeKind::atom, 1}});
  return registry;
}

FockState atom_bell_state(double phase) {
  const double h = std::numbers::sqrt2 / 2.0;
  return FockState(atom_registry(),
                   {{Occupation{1, 0}, Amplitude{h, 0.0}}, {Occupation{0, 1}, std::polar(h, phase)}},
                   true);
}

FockState transfer_to_atoms(const ScenarioResult& result) {
  if (!result.phase_kets) throw Error("transfer_to_atoms: result has no photon ket pair");
  const auto& [ket_a, ket_b] = *result.phase_kets;
  FockState::Terms terms;
  for (const auto& [occupation, amplitude] : result.final_state.terms()) {
    if (occupation == ket_a) {
      terms.emplace(Occupation{1, 0}, amplitude);
    } else if (occupation == ket_b) {
      terms.emplace(Occupation{0, 1}, amplitude);
    } else {
      throw Error("transfer_to_atoms: support outside the two-ket subspace at " +
                  format_ket(result.final_state, occupation));
    }
  }
  return FockState(atom_registry(), std::move(terms)).normalized();
}

EncodedBit encode_bit(int bit) {
  if (bit == 0) return {0.0, atom_bell_state(0.0)};
  if (bit == 1) return {0.5, atom_bell_state(kPi)};
  throw Error("encode_bit: bit must be 0 or 1");
}

ScenarioResult run_mz_photon_detailed(double alpha, double extra_phase, const GaugeChoice& gauge) {
  static const RegistryPtr registry = make_registry({{"e", ModeKind::electron, 1},
                                                     {"h", ModeKind::hole, 1},
                                                     {"gA", ModeKind::photon, 1},
                                                     {"gB", ModeKind::photon, 1}});
  const std::vector<Fluxon> fluxons{Fluxon{"F", Point::Zero(), alpha}};
  ScenarioResult result{zero_state(registry), 0.0, std::nullopt, std::nullopt, gauge, {}, {},
                        fluxons};

  // Pair created at (-1,0); the electron passes above the fluxon, the hole
  // below, and they meet again at (1,0).
  ParticlePath electron{-1, arc_points(Point::Zero(), 1.0, kPi, 0.0, kArcSegments)};
  ParticlePath hole{1, arc_points(Point::Zero(), 1.0, kPi, 2.0 * kPi, kArcSegments)};
  result.branch_phases["e"] = ab_phase(electron, fluxons, gauge);
  result.branch_phases["h"] = ab_phase(hole, fluxons, gauge);
  result.particle_paths = {{"e", electron}, {"h", hole}};

  FockState state = new_state(registry, Occupation{0, 0, 1, 0});
  state = beam_splitter(state, "gA", "gB");
  state = pair_split(state, "gA", "e", "h", VertexPhase{0.0});
  state = pair_recombine(state, "e", "h", "gA",
                         VertexPhase{result.branch_phases["e"] + result.branch_phases["h"]});
  state = phase_shift(state, "gA", VertexPhase{extra_phase});
  state = beam_splitter(state, "gA", "gB");

  Postselection selected = postselect(state, no_charged_particles(*registry));
  result.final_state = selected.state;
  result.postselection_probability = selected.probability;
  return result;
}

DetectionProbabilities mz_probabilities(const ScenarioResult& result) {
  return {mean_occupation(result.final_state, "gB"), mean_occupation(result.final_state, "gA")};
}

DetectionProbabilities run_mz_photon(double alpha, double extra_phase, const GaugeChoice& gauge) {
  return mz_probabilities(run_mz_photon_detailed(alpha, extra_phase, gauge));
}

JonesVector right_circular() {
  const double h = std::numbers::sqrt2 / 2.0;
  return JonesVector(Amplitude{h, 0.0}, Amplitude{0.0, -h});
}

JonesVector left_circular() {
  const double h = std::numbers::sqrt2 / 2.0;
  return JonesVector(Amplitude{h, 0.0}, Amplitude{0.0, h});
}

JonesVector exciton_polarization_rotation(double alpha, const JonesVector& input) {
  if (std::abs(input.squaredNorm() - 1.0) > kCompareTolerance) {
    throw Error("exciton_polarization_rotation: input Jones vector is not normalized");
  }
  const JonesVector right = right_circular();
  const JonesVector left = left_circular();
  const Amplitude c_right = right.dot(input);
  const Amplitude c_left = left.dot(input);
  const double theta = 2.0 * kPi * alpha;
  return c_right * std::polar(1.0, theta) * right + c_left * std::polar(1.0, -theta) * left;
}

bool LooplessCertificate::holds() const {
  for (const LoopCheck& check : checks) {
    for (int w : check.subloop_windings) {
      if (w != 0) return false;
    }
  }
  return true;
}

LooplessCertificate loopless_certificate(const ScenarioResult& result) {
  LooplessCertificate certificate;
  for (const LabeledPath& particle : result.particle_paths) {
    for (const Fluxon& fluxon : result.fluxons) {
      LoopCheck check{particle.label, fluxon.name, subloop_windings(particle.path, fluxon.position),
                      std::nullopt};
      if (!particle.path.is_closed()) {
        try {
          check.chord_winding = winding_number(closed_by_chord(particle.path), fluxon.position);
        } catch (const Error&) {
          // chord runs through the fluxon
        }
      }
      certificate.checks.push_back(std::move(check));
    }
  }
  return certificate;
}

std::optional<std::pair<Occupation, Occupation>> ordered_ket_pair(const FockState& state) {
  if (state.terms().size() != 2) return std::nullopt;
  auto it = state.terms().begin();
  const Occupation low = it->first;
  const Occupation high = std::next(it)->first;
  return std::make_pair(high, low);
}

}  // namespace ab
