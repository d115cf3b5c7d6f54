#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ab/fock.hpp"
#include "ab/geometry.hpp"
#include "ab/scenarios.hpp"

namespace ab::dsl {

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  int line = 1;
  int column = 1;
  std::string message;
};

std::string to_string(const Diagnostic& diagnostic);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

struct FluxonDecl {
  Fluxon fluxon;
  int line = 0;
};

struct ModeDecl {
  Mode mode;
  int line = 0;
};

struct SourceDecl {
  std::string mode;
  Point position = Point::Zero();
  int occupancy = 1;
  int line = 0;
};

struct PathDecl {
  std::string mode;
  ParticlePath path;
  int line = 0;
};

struct BeamSplitterEvent {
  std::string mode_a;
  std::string mode_b;
};

struct PairCreateEvent {
  std::string photon;
  std::string electron;
  std::string hole;
  Point position = Point::Zero();
};

struct PairAnnihilateEvent {
  std::string electron;
  std::string hole;
  std::string photon;
  Point position = Point::Zero();
};

struct Event {
  std::variant<BeamSplitterEvent, PairCreateEvent, PairAnnihilateEvent> action;
  int line = 0;
};

struct DetectCondition {
  std::string mode;
  int occupancy = 0;
};

// Keeps only the terms that satisfy every condition; several detect lines AND.
struct DetectDecl {
  std::vector<DetectCondition> keep;
  int line = 0;
};

/// Parsed interferometer layout. Events run in file order.
struct Setup {
  std::vector<FluxonDecl> fluxons;
  std::vector<ModeDecl> modes;
  RegistryPtr registry;
  std::vector<SourceDecl> sources;
  std::vector<PathDecl> paths;
  std::vector<Event> events;
  std::vector<DetectDecl> detectors;

  const PathDecl* path_for(std::string_view mode) const;
};

// Same declarations in the same order; source lines are ignored.
bool equivalent(const Setup& a, const Setup& b);

struct ParseResult {
  std::optional<Setup> setup;  // present only when no diagnostic is an error
  std::vector<Diagnostic> diagnostics;
};

// Never throws.
ParseResult parse(std::string_view text);

// Topology checks on a parsed layout: path/fluxon collisions and event ordering
// are errors; closed loops around a fluxon, vertices off the path ends, missing
// paths and unused modes are warnings.
std::vector<Diagnostic> validate(const Setup& setup);

// Canonical text: fluxons, modes, sources, paths, events, detectors, one per
// line, shortest round-trip numbers, no comments.
std::string format(const Setup& setup);

using AlphaOverrides = std::map<std::string, double>;

// Every fluxon of the setup set to `alpha`.
AlphaOverrides uniform_alpha(const Setup& setup, double alpha);

// Runs the events against fock_core. Each annihilation vertex carries the sum
// of the AB phases of the two incoming paths. Errors are rethrown prefixed
// with the line of the offending declaration.
ScenarioResult compile(const Setup& setup, const AlphaOverrides& alpha_overrides = {},
                       const GaugeChoice& gauge = SubtendedAngleGauge{});

}  // namespace ab::dsl
