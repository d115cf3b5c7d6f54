#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ab {

using Amplitude = std::complex<double>;

// Amplitudes smaller than this are pruned from every state.
inline constexpr double kDropTolerance = 1e-15;
// Comparison tolerance for norms and amplitudes.
inline constexpr double kCompareTolerance = 1e-12;
// Postselection below this probability is a forbidden branch, not a result.
inline constexpr double kEmptyPostselection = 1e-14;

enum class ModeKind { electron, hole, photon, atom };

std::string_view to_string(ModeKind kind);
std::optional<ModeKind> parse_mode_kind(std::string_view text);

// Electron and hole modes anticommute; photon and atom modes are bosonic.
constexpr bool is_fermionic(ModeKind kind) {
  return kind == ModeKind::electron || kind == ModeKind::hole;
}

struct Mode {
  std::string name;
  ModeKind kind = ModeKind::photon;
  int max_occupancy = 1;

  friend bool operator==(const Mode&, const Mode&) = default;
};

inline constexpr int kMaxBosonicOccupancy = 4;

/// Ordered set of modes. The order fixes the occupation-vector layout and the
/// Jordan-Wigner sign convention for fermionic operators.
class ModeRegistry {
 public:
  explicit ModeRegistry(std::vector<Mode> modes);

  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_.at(i); }
  const std::vector<Mode>& modes() const { return modes_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws ab::Error("unknown mode ...") when absent.
  std::size_t index_of(std::string_view name) const;

  friend bool operator==(const ModeRegistry&, const ModeRegistry&) = default;

 private:
  std::vector<Mode> modes_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

RegistryPtr make_registry(std::vector<Mode> modes);

using Occupation = std::vector<std::uint8_t>;

// Gauge phase attached to an operator application. Never reduced internally.
struct VertexPhase {
  double radians = 0.0;
};

/// Sparse second-quantized state: occupation vectors mapped to amplitudes.
/// Values are immutable once built; every operation returns a new state.
class FockState {
 public:
  using Terms = std::map<Occupation, Amplitude>;

  FockState(RegistryPtr registry, Terms terms, bool normalized = false);

  const RegistryPtr& registry_ptr() const { return registry_; }
  const ModeRegistry& registry() const { return *registry_; }
  const Terms& terms() const { return terms_; }
  bool is_normalized() const { return normalized_; }
  bool empty() const { return terms_.empty(); }

  double norm_squared() const;
  Amplitude amplitude(const Occupation& occupation) const;

  FockState normalized() const;

  friend FockState operator+(const FockState& a, const FockState& b);
  friend FockState operator-(const FockState& a, const FockState& b);
  friend FockState operator*(Amplitude factor, const FockState& state);

 private:
  RegistryPtr registry_;
  Terms terms_;
  bool normalized_ = false;
};

using OccupationPredicate = std::function<bool(const Occupation&)>;

FockState new_state(RegistryPtr registry, const Occupation& initial_occupation);
FockState vacuum(RegistryPtr registry);
FockState zero_state(RegistryPtr registry);

// a^dagger with amplitude factor e^{i phase} sqrt(n+1), Jordan-Wigner signed.
FockState apply_creation(const FockState& state, std::string_view mode, VertexPhase phase = {});
// a with factor sqrt(n), same sign convention.
FockState apply_annihilation(const FockState& state, std::string_view mode);

// Symmetric 50/50 splitter: a^dagger -> (a^dagger + i b^dagger)/sqrt2,
// b^dagger -> (i a^dagger + b^dagger)/sqrt2. Throws when an output term would
// exceed a bosonic max_occupancy.
FockState beam_splitter(const FockState& state, std::string_view mode_a, std::string_view mode_b);

// e^{i phase} a_gamma^dagger a_h a_e. Terms without the pair vanish.
FockState pair_vertex_annihilate(const FockState& state, std::string_view e_mode,
                                 std::string_view h_mode, std::string_view photon_mode,
                                 VertexPhase phase);
// e^{i phase} a_e^dagger a_h^dagger a_gamma, the adjoint of the above at zero phase.
FockState pair_vertex_create(const FockState& state, std::string_view photon_mode,
                             std::string_view e_mode, std::string_view h_mode, VertexPhase phase);

// Pipeline forms of the two vertices: terms that hold the consumed
// excitation(s) are converted with unit coupling, all other terms pass through
// unchanged. This is the map used when a layout has a vertex at a point the
// particles may or may not reach.
FockState pair_recombine(const FockState& state, std::string_view e_mode, std::string_view h_mode,
                         std::string_view photon_mode, VertexPhase phase);
FockState pair_split(const FockState& state, std::string_view photon_mode,
                     std::string_view e_mode, std::string_view h_mode, VertexPhase phase);

// Multiplies each term by e^{i phase n}, n the occupation of `mode`.
FockState phase_shift(const FockState& state, std::string_view mode, VertexPhase phase);

// Keeps matching terms without renormalizing.
FockState project(const FockState& state, const OccupationPredicate& predicate);

struct Postselection {
  FockState state;
  double probability = 0.0;
};

// Throws "empty postselection" when the kept probability is below 1e-14.
Postselection postselect(const FockState& state, const OccupationPredicate& predicate);

OccupationPredicate no_charged_particles(const ModeRegistry& registry);

// arg(amp_b) - arg(amp_a), wrapped to (-pi, pi].
double relative_phase(const FockState& state, const Occupation& ket_a, const Occupation& ket_b);

// <target|state>
Amplitude overlap(const FockState& state, const FockState& target);

double mean_occupation(const FockState& state, std::string_view mode);

// Reduced density matrix of one mode, indexed by occupation 0..max_occupancy.
Eigen::MatrixXcd reduced_density_matrix(const FockState& state, std::string_view mode);

// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);
// Distance between two angles on the circle.
double angular_distance(double a, double b);

std::string format_ket(const FockState& state, const Occupation& occupation);
std::string to_string(const FockState& state);

}  // namespace ab
