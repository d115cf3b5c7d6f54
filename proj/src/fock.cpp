#include "ab/fock.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "ab/error.hpp"

namespace ab {

namespace {

using Terms = FockState::Terms;

int jordan_wigner_sign(const ModeRegistry& registry, const Occupation& occupation,
                       std::size_t index) {
  if (!is_fermionic(registry.mode(index).kind)) return 1;
  int parity = 0;
  for (std::size_t i = 0; i < index; ++i) {
    if (is_fermionic(registry.mode(i).kind)) parity += occupation[i];
  }
  return (parity % 2 == 0) ? 1 : -1;
}

void accumulate(Terms& terms, const Occupation& occupation, Amplitude amplitude) {
  auto [it, inserted] = terms.try_emplace(occupation, amplitude);
  if (!inserted) it->second += amplitude;
}

// Raises mode `index` in every term. With allow_overflow the bosonic cap is
// ignored; the caller must check the result.
Terms raise(const ModeRegistry& registry, const Terms& terms, std::size_t index, Amplitude factor,
            bool allow_overflow = false) {
  const Mode& mode = registry.mode(index);
  Terms out;
  for (const auto& [occupation, amplitude] : terms) {
    const int n = occupation[index];
    if (is_fermionic(mode.kind) && n >= 1) continue;
    if (!allow_overflow && n >= mode.max_occupancy) continue;
    Occupation next = occupation;
    next[index] = static_cast<std::uint8_t>(n + 1);
    const double ladder = std::sqrt(static_cast<double>(n + 1));
    accumulate(out, next,
               amplitude * factor * ladder *
                   static_cast<double>(jordan_wigner_sign(registry, occupation, index)));
  }
  return out;
}

Terms lower(const ModeRegistry& registry, const Terms& terms, std::size_t index) {
  Terms out;
  for (const auto& [occupation, amplitude] : terms) {
    const int n = occupation[index];
    if (n == 0) continue;
    Occupation next = occupation;
    next[index] = static_cast<std::uint8_t>(n - 1);
    const double ladder = std::sqrt(static_cast<double>(n));
    accumulate(out, next,
               amplitude * ladder *
                   static_cast<double>(jordan_wigner_sign(registry, occupation, index)));
  }
  return out;
}

void add_scaled(Terms& into, const Terms& from, Amplitude factor) {
  for (const auto& [occupation, amplitude] : from) accumulate(into, occupation, factor * amplitude);
}

void require_kind(const ModeRegistry& registry, std::size_t index, ModeKind kind,
                  std::string_view role) {
  const Mode& mode = registry.mode(index);
  if (mode.kind != kind) {
    throw Error("mode '" + mode.name + "' has kind " + std::string(to_string(mode.kind)) +
                ", expected " + std::string(to_string(kind)) + " for " + std::string(role));
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Amplitude phase_factor(VertexPhase phase) { return std::polar(1.0, phase.radians); }

}  // namespace

std::string_view to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::electron: return "electron";
    case ModeKind::hole: return "hole";
    case ModeKind::photon: return "photon";
    case ModeKind::atom: return "atom";
  }
  return "unknown";
}

std::optional<ModeKind> parse_mode_kind(std::string_view text) {
  if (text == "electron") return ModeKind::electron;
  if (text == "hole") return ModeKind::hole;
  if (text == "photon") return ModeKind::photon;
  if (text == "atom") return ModeKind::atom;
  return std::nullopt;
}

ModeRegistry::ModeRegistry(std::vector<Mode> modes) : modes_(std::move(modes)) {
  std::set<std::string> seen;
  for (const Mode& mode : modes_) {
    if (mode.name.empty()) throw Error("mode name must not be empty");
    if (!seen.insert(mode.name).second) throw Error("duplicate mode name '" + mode.name + "'");
    if (is_fermionic(mode.kind)) {
      if (mode.max_occupancy != 1) {
        throw Error("mode '" + mode.name + "': fermionic max_occupancy must be 1");
      }
    } else if (mode.max_occupancy < 1 || mode.max_occupancy > kMaxBosonicOccupancy) {
      throw Error("mode '" + mode.name + "': bosonic max_occupancy must be in [1, 4]");
    }
  }
}

std::optional<std::size_t> ModeRegistry::find(std::string_view name) const {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ModeRegistry::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error("unknown mode '" + std::string(name) + "'");
}

RegistryPtr make_registry(std::vector<Mode> modes) {
  return std::make_shared<const ModeRegistry>(std::move(modes));
}

FockState::FockState(RegistryPtr registry, Terms terms, bool normalized)
    : registry_(std::move(registry)), normalized_(normalized) {
  if (!registry_) throw Error("FockState requires a registry");
  const std::size_t size = registry_->size();
  for (auto& [occupation, amplitude] : terms) {
    if (occupation.size() != size) throw Error("occupation vector length does not match registry");
    for (std::size_t i = 0; i < size; ++i) {
      if (occupation[i] > registry_->mode(i).max_occupancy) {
        throw Error("occupation of mode '" + registry_->mode(i).name + "' exceeds max_occupancy");
      }
    }
    if (std::abs(amplitude) >= kDropTolerance) terms_.emplace(occupation, amplitude);
  }
}

double FockState::norm_squared() const {
  double sum = 0.0;
  for (const auto& [occupation, amplitude] : terms_) sum += std::norm(amplitude);
  return sum;
}

Amplitude FockState::amplitude(const Occupation& occupation) const {
  auto it = terms_.find(occupation);
  return it == terms_.end() ? Amplitude{} : it->second;
}

FockState FockState::normalized() const {
  const double norm2 = norm_squared();
  if (norm2 <= 0.0) throw Error("cannot normalize the zero state");
  Terms scaled = terms_;
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& [occupation, amplitude] : scaled) amplitude *= inv;
  return FockState(registry_, std::move(scaled), true);
}

namespace {
void require_same_registry(const FockState& a, const FockState& b) {
  if (a.registry_ptr() != b.registry_ptr() && !(a.registry() == b.registry())) {
    throw Error("registry mismatch between states");
  }
}
}  // namespace

FockState operator+(const FockState& a, const FockState& b) {
  require_same_registry(a, b);
  Terms terms = a.terms_;
  add_scaled(terms, b.terms_, 1.0);
  return FockState(a.registry_, std::move(terms));
}

FockState operator-(const FockState& a, const FockState& b) {
  require_same_registry(a, b);
  Terms terms = a.terms_;
  add_scaled(terms, b.terms_, -1.0);
  return FockState(a.registry_, std::move(terms));
}

FockState operator*(Amplitude factor, const FockState& state) {
  Terms terms;
  add_scaled(terms, state.terms_, factor);
  return FockState(state.registry_, std::move(terms),
                   state.normalized_ && std::abs(std::abs(factor) - 1.0) <= kCompareTolerance);
}

FockState new_state(RegistryPtr registry, const Occupation& initial_occupation) {
  if (!registry) throw Error("new_state requires a registry");
  if (initial_occupation.size() != registry->size()) {
    throw Error("initial occupation has " + std::to_string(initial_occupation.size()) +
                " entries, registry has " + std::to_string(registry->size()) + " modes");
  }
  for (std::size_t i = 0; i < registry->size(); ++i) {
    if (initial_occupation[i] > registry->mode(i).max_occupancy) {
      throw Error("mode '" + registry->mode(i).name + "': occupation " +
                  std::to_string(initial_occupation[i]) + " exceeds max_occupancy " +
                  std::to_string(registry->mode(i).max_occupancy));
    }
  }
  return FockState(registry, Terms{{initial_occupation, Amplitude{1.0, 0.0}}}, true);
}

FockState vacuum(RegistryPtr registry) {
  const std::size_t size = registry->size();
  return new_state(std::move(registry), Occupation(size, 0));
}

FockState zero_state(RegistryPtr registry) { return FockState(std::move(registry), Terms{}); }

FockState apply_creation(const FockState& state, std::string_view mode, VertexPhase phase) {
  const std::size_t index = state.registry().index_of(mode);
  return FockState(state.registry_ptr(),
                   raise(state.registry(), state.terms(), index, phase_factor(phase)));
}

FockState apply_annihilation(const FockState& state, std::string_view mode) {
  const std::size_t index = state.registry().index_of(mode);
  return FockState(state.registry_ptr(), lower(state.registry(), state.terms(), index));
}

FockState beam_splitter(const FockState& state, std::string_view mode_a, std::string_view mode_b) {
  const ModeRegistry& registry = state.registry();
  const std::size_t a = registry.index_of(mode_a);
  const std::size_t b = registry.index_of(mode_b);
  if (a == b) throw Error("beam splitter needs two distinct modes");
  if (registry.mode(a).kind != registry.mode(b).kind) {
    throw Error("beam splitter kind mismatch: '" + registry.mode(a).name + "' is " +
                std::string(to_string(registry.mode(a).kind)) + ", '" + registry.mode(b).name +
                "' is " + std::string(to_string(registry.mode(b).kind)));
  }

  const double root_half = std::numbers::sqrt2 / 2.0;
  const Amplitude i_unit{0.0, 1.0};
  const std::size_t size = registry.size();

  // U|n> = prod_j (U c_j^dagger U^dagger)^{n_j} / sqrt(n_j!) |0>, with the
  // product taken in registry order; operators are applied right to left.
  Terms out;
  for (const auto& [occupation, amplitude] : state.terms()) {
    Terms partial{{Occupation(size, 0), amplitude}};
    for (std::size_t j = size; j-- > 0;) {
      for (int k = 0; k < occupation[j]; ++k) {
        if (j == a) {
          Terms next = raise(registry, partial, a, root_half, true);
          add_scaled(next, raise(registry, partial, b, root_half, true), i_unit);
          partial = std::move(next);
        } else if (j == b) {
          Terms next = raise(registry, partial, a, root_half * i_unit, true);
          add_scaled(next, raise(registry, partial, b, root_half, true), 1.0);
          partial = std::move(next);
        } else {
          partial = raise(registry, partial, j, 1.0, true);
        }
      }
      if (occupation[j] > 1) {
        const double inv = 1.0 / std::sqrt(factorial(occupation[j]));
        for (auto& [occ, amp] : partial) amp *= inv;
      }
    }
    add_scaled(out, partial, 1.0);
  }

  for (const auto& [occupation, amp] : out) {
    if (std::abs(amp) < kDropTolerance) continue;
    for (std::size_t i : {a, b}) {
      if (occupation[i] > registry.mode(i).max_occupancy) {
        throw Error("beam splitter output exceeds max_occupancy of mode '" +
                    registry.mode(i).name + "'");
      }
    }
  }
  return FockState(state.registry_ptr(), std::move(out), state.is_normalized());
}

FockState pair_vertex_annihilate(const FockState& state, std::string_view e_mode,
                                 std::string_view h_mode, std::string_view photon_mode,
                                 VertexPhase phase) {
  const ModeRegistry& registry = state.registry();
  const std::size_t e = registry.index_of(e_mode);
  const std::size_t h = registry.index_of(h_mode);
  const std::size_t g = registry.index_of(photon_mode);
  require_kind(registry, e, ModeKind::electron, "pair annihilation");
  require_kind(registry, h, ModeKind::hole, "pair annihilation");
  require_kind(registry, g, ModeKind::photon, "pair annihilation");

  Terms terms = lower(registry, state.terms(), e);
  terms = lower(registry, terms, h);
  terms = raise(registry, terms, g, phase_factor(phase));
  return FockState(state.registry_ptr(), std::move(terms));
}

FockState pair_vertex_create(const FockState& state, std::string_view photon_mode,
                             std::string_view e_mode, std::string_view h_mode, VertexPhase phase) {
  const ModeRegistry& registry = state.registry();
  const std::size_t g = registry.index_of(photon_mode);
  const std::size_t e = registry.index_of(e_mode);
  const std::size_t h = registry.index_of(h_mode);
  require_kind(registry, g, ModeKind::photon, "pair creation");
  require_kind(registry, e, ModeKind::electron, "pair creation");
  require_kind(registry, h, ModeKind::hole, "pair creation");

  Terms terms = lower(registry, state.terms(), g);
  terms = raise(registry, terms, h, 1.0);
  terms = raise(registry, terms, e, phase_factor(phase));
  return FockState(state.registry_ptr(), std::move(terms));
}

FockState pair_recombine(const FockState& state, std::string_view e_mode, std::string_view h_mode,
                         std::string_view photon_mode, VertexPhase phase) {
  const std::size_t e = state.registry().index_of(e_mode);
  const std::size_t h = state.registry().index_of(h_mode);
  auto has_pair = [e, h](const Occupation& occ) { return occ[e] > 0 && occ[h] > 0; };
  const FockState paired = project(state, has_pair);
  const FockState rest = project(state, [&](const Occupation& occ) { return !has_pair(occ); });
  return pair_vertex_annihilate(paired, e_mode, h_mode, photon_mode, phase) + rest;
}

FockState pair_split(const FockState& state, std::string_view photon_mode,
                     std::string_view e_mode, std::string_view h_mode, VertexPhase phase) {
  const std::size_t g = state.registry().index_of(photon_mode);
  auto has_photon = [g](const Occupation& occ) { return occ[g] > 0; };
  const FockState lit = project(state, has_photon);
  const FockState rest = project(state, [&](const Occupation& occ) { return !has_photon(occ); });
  return pair_vertex_create(lit, photon_mode, e_mode, h_mode, phase) + rest;
}

FockState phase_shift(const FockState& state, std::string_view mode, VertexPhase phase) {
  const std::size_t index = state.registry().index_of(mode);
  Terms terms;
  for (const auto& [occupation, amplitude] : state.terms()) {
    terms.emplace(occupation, amplitude * std::polar(1.0, phase.radians * occupation[index]));
  }
  return FockState(state.registry_ptr(), std::move(terms), state.is_normalized());
}

FockState project(const FockState& state, const OccupationPredicate& predicate) {
  Terms kept;
  for (const auto& [occupation, amplitude] : state.terms()) {
    if (predicate(occupation)) kept.emplace(occupation, amplitude);
  }
  return FockState(state.registry_ptr(), std::move(kept));
}

Postselection postselect(const FockState& state, const OccupationPredicate& predicate) {
  const double total = state.norm_squared();
  const FockState kept = project(state, predicate);
  const double probability = total > 0.0 ? kept.norm_squared() / total : 0.0;
  if (probability < kEmptyPostselection) {
    throw Error("empty postselection: kept probability " + std::to_string(probability));
  }
  return {kept.normalized(), probability};
}

OccupationPredicate no_charged_particles(const ModeRegistry& registry) {
  std::vector<std::size_t> charged;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    if (is_fermionic(registry.mode(i).kind)) charged.push_back(i);
  }
  return [charged](const Occupation& occ) {
    for (std::size_t i : charged) {
      if (occ[i] != 0) return false;
    }
    return true;
  };
}

double wrap_angle(double radians) {
  double r = std::remainder(radians, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

double relative_phase(const FockState& state, const Occupation& ket_a, const Occupation& ket_b) {
  const Amplitude amp_a = state.amplitude(ket_a);
  const Amplitude amp_b = state.amplitude(ket_b);
  if (std::abs(amp_a) <= kCompareTolerance || std::abs(amp_b) <= kCompareTolerance) {
    throw Error("undefined relative phase: ket " +
                format_ket(state, std::abs(amp_a) <= kCompareTolerance ? ket_a : ket_b) +
                " is absent");
  }
  return wrap_angle(std::arg(amp_b * std::conj(amp_a)));
}

Amplitude overlap(const FockState& state, const FockState& target) {
  require_same_registry(state, target);
  Amplitude sum{};
  const auto& small = state.terms().size() <= target.terms().size() ? state.terms() : target.terms();
  for (const auto& [occupation, unused] : small) {
    sum += std::conj(target.amplitude(occupation)) * state.amplitude(occupation);
  }
  return sum;
}

double mean_occupation(const FockState& state, std::string_view mode) {
  const std::size_t index = state.registry().index_of(mode);
  const double norm2 = state.norm_squared();
  if (norm2 <= 0.0) throw Error("mean occupation of the zero state");
  double sum = 0.0;
  for (const auto& [occupation, amplitude] : state.terms()) {
    sum += occupation[index] * std::norm(amplitude);
  }
  return sum / norm2;
}

Eigen::MatrixXcd reduced_density_matrix(const FockState& state, std::string_view mode) {
  const std::size_t index = state.registry().index_of(mode);
  const int dim = state.registry().mode(index).max_occupancy + 1;
  const double norm2 = state.norm_squared();
  if (norm2 <= 0.0) throw Error("reduced density matrix of the zero state");

  // Group amplitudes by the occupation of every other mode.
  std::map<Occupation, Eigen::VectorXcd> by_rest;
  for (const auto& [occupation, amplitude] : state.terms()) {
    Occupation rest = occupation;
    rest[index] = 0;
    auto [it, inserted] = by_rest.try_emplace(rest, Eigen::VectorXcd::Zero(dim));
    it->second(occupation[index]) += amplitude;
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [rest, column] : by_rest) rho += column * column.adjoint();
  return rho / norm2;
}

std::string format_ket(const FockState& state, const Occupation& occupation) {
  std::ostringstream out;
  out << '|';
  bool any = false;
  for (std::size_t i = 0; i < occupation.size() && i < state.registry().size(); ++i) {
    if (occupation[i] == 0) continue;
    if (any) out << ' ';
    out << state.registry().mode(i).name << '=' << static_cast<int>(occupation[i]);
    any = true;
  }
  if (!any) out << "vac";
  out << '>';
  return out.str();
}

std::string to_string(const FockState& state) {
  if (state.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [occupation, amplitude] : state.terms()) {
    if (!first) out << " + ";
    out << '(' << amplitude.real() << (amplitude.imag() < 0 ? "-" : "+") << std::abs(amplitude.imag())
        << "i)" << format_ket(state, occupation);
    first = false;
  }
  return out.str();
}

}  // namespace ab
