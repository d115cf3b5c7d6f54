#include "ab/setup_dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "ab/error.hpp"

namespace ab::dsl {

namespace {

constexpr double kVertexTolerance = 1e-9;

struct Token {
  std::string_view text;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  const auto is_space = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\v' || ch == '\f';
  };
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  const auto alpha = [](char ch) {
    return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') || ch == '_';
  };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [&](char ch) { return alpha(ch) || (ch >= '0' && ch <= '9'); });
}

std::optional<double> to_number(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<int> to_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string quoted(std::string_view text) { return "'" + std::string(text) + "'"; }

class Parser {
 public:
  ParseResult run(std::string_view text) {
    split_lines(text);
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const int number = static_cast<int>(i) + 1;
      if (lines_[i].empty()) continue;
      const std::string_view keyword = lines_[i].front().text;
      if (keyword == "fluxon") {
        parse_fluxon(number, lines_[i]);
      } else if (keyword == "mode") {
        parse_mode(number, lines_[i]);
      }
    }
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const int number = static_cast<int>(i) + 1;
      if (lines_[i].empty()) continue;
      const std::vector<Token>& tokens = lines_[i];
      const std::string_view keyword = tokens.front().text;
      if (keyword == "fluxon" || keyword == "mode") continue;
      if (keyword == "source") {
        parse_source(number, tokens);
      } else if (keyword == "path") {
        parse_path(number, tokens);
      } else if (keyword == "bs") {
        parse_bs(number, tokens);
      } else if (keyword == "create") {
        parse_create(number, tokens);
      } else if (keyword == "annih") {
        parse_annih(number, tokens);
      } else if (keyword == "detect") {
        parse_detect(number, tokens);
      } else {
        error(number, tokens.front().column, "unknown declaration " + quoted(keyword));
      }
    }
    if (setup_.modes.empty()) error(1, 1, "no modes declared");

    ParseResult result;
    if (!has_errors(diagnostics_)) {
      std::vector<Mode> modes;
      for (const ModeDecl& decl : setup_.modes) modes.push_back(decl.mode);
      setup_.registry = make_registry(std::move(modes));
      result.setup = std::move(setup_);
    }
    std::stable_sort(diagnostics_.begin(), diagnostics_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.line, a.column) < std::tie(b.line, b.column);
                     });
    result.diagnostics = std::move(diagnostics_);
    return result;
  }

 private:
  void split_lines(std::string_view text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      lines_.push_back(tokenize(line));
      start = end + 1;
    }
  }

  void error(int line, int column, std::string message) {
    diagnostics_.push_back({Severity::error, line, column, std::move(message)});
  }

  bool expect_count(int line, const std::vector<Token>& tokens, std::size_t fields) {
    if (tokens.size() == fields + 1) return true;
    error(line, tokens.front().column, "expected " + std::to_string(fields) + " fields");
    return false;
  }

  std::optional<double> number(int line, const Token& token) {
    std::optional<double> value = to_number(token.text);
    if (!value) error(line, token.column, "expected a number, got " + quoted(token.text));
    return value;
  }

  std::optional<Point> point(int line, const Token& x, const Token& y) {
    const std::optional<double> px = number(line, x);
    const std::optional<double> py = number(line, y);
    if (!px || !py) return std::nullopt;
    return Point(*px, *py);
  }

  bool identifier(int line, const Token& token) {
    if (is_identifier(token.text)) return true;
    error(line, token.column, "invalid identifier " + quoted(token.text));
    return false;
  }

  bool literal(int line, const Token& token, std::string_view expected) {
    if (token.text == expected) return true;
    error(line, token.column, "expected " + quoted(expected) + ", got " + quoted(token.text));
    return false;
  }

  const Mode* known_mode(int line, const Token& token) {
    for (const ModeDecl& decl : setup_.modes) {
      if (decl.mode.name == token.text) return &decl.mode;
    }
    if (is_identifier(token.text)) {
      error(line, token.column, "unknown mode " + quoted(token.text));
    } else {
      error(line, token.column, "invalid identifier " + quoted(token.text));
    }
    return nullptr;
  }

  void parse_fluxon(int line, const std::vector<Token>& t) {
    if (!expect_count(line, t, 4)) return;
    const bool name_ok = identifier(line, t[1]);
    const std::optional<Point> position = point(line, t[2], t[3]);
    const std::optional<double> alpha = number(line, t[4]);
    if (!name_ok || !position || !alpha) return;
    for (const FluxonDecl& decl : setup_.fluxons) {
      if (decl.fluxon.name == t[1].text) {
        error(line, t[1].column, "duplicate fluxon " + quoted(t[1].text));
        return;
      }
    }
    setup_.fluxons.push_back({Fluxon{std::string(t[1].text), *position, *alpha}, line});
  }

  void parse_mode(int line, const std::vector<Token>& t) {
    if (t.size() != 3 && t.size() != 4) {
      error(line, t.front().column, "expected 2 or 3 fields");
      return;
    }
    if (!identifier(line, t[1])) return;
    const std::optional<ModeKind> kind = parse_mode_kind(t[2].text);
    if (!kind) {
      error(line, t[2].column, "unknown mode kind " + quoted(t[2].text));
      return;
    }
    int cap = 1;
    if (t.size() == 4) {
      const std::optional<int> parsed = to_int(t[3].text);
      if (!parsed) {
        error(line, t[3].column, "expected an integer occupancy cap, got " + quoted(t[3].text));
        return;
      }
      cap = *parsed;
      if (is_fermionic(*kind) && cap != 1) {
        error(line, t[3].column, "fermionic modes have occupancy cap 1");
        return;
      }
      if (cap < 1 || cap > kMaxBosonicOccupancy) {
        error(line, t[3].column,
              "occupancy cap must lie in [1, " + std::to_string(kMaxBosonicOccupancy) + "]");
        return;
      }
    }
    for (const ModeDecl& decl : setup_.modes) {
      if (decl.mode.name == t[1].text) {
        error(line, t[1].column, "duplicate mode " + quoted(t[1].text));
        return;
      }
    }
    setup_.modes.push_back({Mode{std::string(t[1].text), *kind, cap}, line});
  }

  void parse_source(int line, const std::vector<Token>& t) {
    if (!expect_count(line, t, 4)) return;
    const Mode* mode = known_mode(line, t[1]);
    const std::optional<Point> position = point(line, t[2], t[3]);
    const std::optional<int> occupancy = to_int(t[4].text);
    if (!occupancy) error(line, t[4].column, "expected an integer occupancy, got " + quoted(t[4].text));
    if (!mode || !position || !occupancy) return;
    if (*occupancy < 0 || *occupancy > mode->max_occupancy) {
      error(line, t[4].column, "occupancy " + std::to_string(*occupancy) + " outside [0, " +
                                   std::to_string(mode->max_occupancy) + "] for mode " +
                                   quoted(mode->name));
      return;
    }
    for (const SourceDecl& decl : setup_.sources) {
      if (decl.mode == mode->name) {
        error(line, t[1].column, "second source for mode " + quoted(mode->name));
        return;
      }
    }
    setup_.sources.push_back({mode->name, *position, *occupancy, line});
  }

  void parse_path(int line, const std::vector<Token>& t) {
    if (t.size() < 6 || (t.size() - 2) % 2 != 0) {
      error(line, t.front().column, "expected a mode and an even number of coordinates (at least 4)");
      return;
    }
    const Mode* mode = known_mode(line, t[1]);
    std::vector<Point> points;
    bool ok = mode != nullptr;
    for (std::size_t i = 2; i + 1 < t.size(); i += 2) {
      const std::optional<Point> p = point(line, t[i], t[i + 1]);
      if (!p) {
        ok = false;
        continue;
      }
      if (!points.empty() && (*p - points.back()).norm() == 0.0) {
        error(line, t[i].column, "repeated consecutive path point");
        ok = false;
      }
      points.push_back(*p);
    }
    if (!ok) return;
    if (!is_fermionic(mode->kind)) {
      error(line, t[1].column, "path needs a charged mode, " + quoted(mode->name) + " is " +
                                   std::string(to_string(mode->kind)));
      return;
    }
    for (const PathDecl& decl : setup_.paths) {
      if (decl.mode == mode->name) {
        error(line, t[1].column, "second path for mode " + quoted(mode->name));
        return;
      }
    }
    const int sign = mode->kind == ModeKind::electron ? -1 : 1;
    setup_.paths.push_back({mode->name, ParticlePath{sign, std::move(points)}, line});
  }

  void parse_bs(int line, const std::vector<Token>& t) {
    if (!expect_count(line, t, 2)) return;
    const Mode* a = known_mode(line, t[1]);
    const Mode* b = known_mode(line, t[2]);
    if (!a || !b) return;
    if (a == b) {
      error(line, t[2].column, "beam splitter needs two distinct modes");
      return;
    }
    setup_.events.push_back({BeamSplitterEvent{a->name, b->name}, line});
  }

  void parse_create(int line, const std::vector<Token>& t) {
    if (!expect_count(line, t, 7)) return;
    const Mode* photon = known_mode(line, t[1]);
    const bool arrow = literal(line, t[2], "->");
    const Mode* electron = known_mode(line, t[3]);
    const Mode* hole = known_mode(line, t[4]);
    const bool at = literal(line, t[5], "@");
    const std::optional<Point> position = point(line, t[6], t[7]);
    if (!photon || !arrow || !electron || !hole || !at || !position) return;
    setup_.events.push_back(
        {PairCreateEvent{photon->name, electron->name, hole->name, *position}, line});
  }

  void parse_annih(int line, const std::vector<Token>& t) {
    if (!expect_count(line, t, 7)) return;
    const Mode* electron = known_mode(line, t[1]);
    const Mode* hole = known_mode(line, t[2]);
    const bool arrow = literal(line, t[3], "->");
    const Mode* photon = known_mode(line, t[4]);
    const bool at = literal(line, t[5], "@");
    const std::optional<Point> position = point(line, t[6], t[7]);
    if (!photon || !arrow || !electron || !hole || !at || !position) return;
    setup_.events.push_back(
        {PairAnnihilateEvent{electron->name, hole->name, photon->name, *position}, line});
  }

  void parse_detect(int line, const std::vector<Token>& t) {
    if (t.size() < 3) {
      error(line, t.front().column, "expected 'keep' and at least one <mode>=<occ>");
      return;
    }
    if (!literal(line, t[1], "keep")) return;
    DetectDecl decl{{}, line};
    bool ok = true;
    for (std::size_t i = 2; i < t.size(); ++i) {
      const std::size_t eq = t[i].text.find('=');
      if (eq == std::string_view::npos) {
        error(line, t[i].column, "expected <mode>=<occ>, got " + quoted(t[i].text));
        ok = false;
        continue;
      }
      const Token name{t[i].text.substr(0, eq), t[i].column};
      const Mode* mode = known_mode(line, name);
      const std::optional<int> occupancy = to_int(t[i].text.substr(eq + 1));
      if (!occupancy) {
        error(line, t[i].column + static_cast<int>(eq) + 1, "expected an integer occupancy");
      }
      if (!mode || !occupancy) {
        ok = false;
        continue;
      }
      decl.keep.push_back({mode->name, *occupancy});
    }
    if (ok) setup_.detectors.push_back(std::move(decl));
  }

  std::vector<std::vector<Token>> lines_;
  Setup setup_;
  std::vector<Diagnostic> diagnostics_;
};

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

bool same_point(const Point& a, const Point& b) { return a == b; }

bool same_fluxon(const Fluxon& a, const Fluxon& b) {
  return a.name == b.name && same_point(a.position, b.position) && a.alpha == b.alpha;
}

template <typename T, typename Eq>
bool same_sequence(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), eq);
}

bool same_event(const Event& a, const Event& b) {
  if (a.action.index() != b.action.index()) return false;
  if (const auto* x = std::get_if<BeamSplitterEvent>(&a.action)) {
    const auto& y = std::get<BeamSplitterEvent>(b.action);
    return x->mode_a == y.mode_a && x->mode_b == y.mode_b;
  }
  if (const auto* x = std::get_if<PairCreateEvent>(&a.action)) {
    const auto& y = std::get<PairCreateEvent>(b.action);
    return x->photon == y.photon && x->electron == y.electron && x->hole == y.hole &&
           same_point(x->position, y.position);
  }
  const auto& x = std::get<PairAnnihilateEvent>(a.action);
  const auto& y = std::get<PairAnnihilateEvent>(b.action);
  return x.electron == y.electron && x.hole == y.hole && x.photon == y.photon &&
         same_point(x.position, y.position);
}

bool near(const Point& a, const Point& b) { return (a - b).norm() <= kVertexTolerance; }

double path_distance(const ParticlePath& path, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    best = std::min(best, point_segment_distance(p, path.points[i], path.points[i + 1]));
  }
  return best;
}

}  // namespace

std::string to_string(const Diagnostic& d) {
  std::ostringstream out;
  out << d.line << ':' << d.column << ": " << (d.severity == Severity::error ? "error" : "warning")
      << ": " << d.message;
  return out.str();
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

const PathDecl* Setup::path_for(std::string_view mode) const {
  for (const PathDecl& decl : paths) {
    if (decl.mode == mode) return &decl;
  }
  return nullptr;
}

bool equivalent(const Setup& a, const Setup& b) {
  const bool registries = (a.registry && b.registry) ? *a.registry == *b.registry
                                                     : a.registry == b.registry;
  return registries &&
         same_sequence(a.fluxons, b.fluxons,
                       [](const FluxonDecl& x, const FluxonDecl& y) {
                         return same_fluxon(x.fluxon, y.fluxon);
                       }) &&
         same_sequence(a.modes, b.modes,
                       [](const ModeDecl& x, const ModeDecl& y) { return x.mode == y.mode; }) &&
         same_sequence(a.sources, b.sources,
                       [](const SourceDecl& x, const SourceDecl& y) {
                         return x.mode == y.mode && same_point(x.position, y.position) &&
                                x.occupancy == y.occupancy;
                       }) &&
         same_sequence(a.paths, b.paths,
                       [](const PathDecl& x, const PathDecl& y) {
                         return x.mode == y.mode && x.path.charge_sign == y.path.charge_sign &&
                                same_sequence(x.path.points, y.path.points, same_point);
                       }) &&
         same_sequence(a.events, b.events, same_event) &&
         same_sequence(a.detectors, b.detectors, [](const DetectDecl& x, const DetectDecl& y) {
           return same_sequence(x.keep, y.keep, [](const DetectCondition& p, const DetectCondition& q) {
             return p.mode == q.mode && p.occupancy == q.occupancy;
           });
         });
}

ParseResult parse(std::string_view text) {
  try {
    return Parser().run(text);
  } catch (const std::exception& e) {
    ParseResult result;
    result.diagnostics.push_back({Severity::error, 1, 1, std::string("internal error: ") + e.what()});
    return result;
  }
}

std::vector<Diagnostic> validate(const Setup& setup) {
  std::vector<Diagnostic> out;
  const auto error = [&](int line, std::string message) {
    out.push_back({Severity::error, line, 1, std::move(message)});
  };
  const auto warning = [&](int line, std::string message) {
    out.push_back({Severity::warning, line, 1, std::move(message)});
  };
  const auto kind_of = [&](const std::string& name) {
    return setup.registry->mode(setup.registry->index_of(name)).kind;
  };

  std::set<std::string> used;
  for (const PathDecl& decl : setup.paths) {
    used.insert(decl.mode);
    for (const FluxonDecl& flux : setup.fluxons) {
      if (path_distance(decl.path, flux.fluxon.position) <= kGeometryTolerance) {
        error(decl.line, "path of " + quoted(decl.mode) + " passes through fluxon " +
                             quoted(flux.fluxon.name));
        continue;
      }
      const std::vector<int> windings = subloop_windings(decl.path, flux.fluxon.position);
      if (std::any_of(windings.begin(), windings.end(), [](int w) { return w != 0; })) {
        warning(decl.line, "particle " + decl.mode + " singly encircles fluxon " + flux.fluxon.name);
      }
    }
  }

  std::set<std::string> populated;
  for (const SourceDecl& source : setup.sources) {
    used.insert(source.mode);
    if (source.occupancy > 0) populated.insert(source.mode);
  }
  const auto require_kind = [&](int line, const std::string& mode, ModeKind kind,
                                std::string_view role) {
    if (kind_of(mode) == kind) return true;
    error(line, std::string(role) + " " + quoted(mode) + " must be a " +
                    std::string(to_string(kind)) + " mode");
    return false;
  };
  const auto require_populated = [&](int line, const std::string& mode) {
    if (populated.count(mode)) return;
    error(line, "mode " + quoted(mode) + " is used before anything populates it");
  };
  const auto check_end = [&](int line, const std::string& mode, const Point& vertex, bool start) {
    const PathDecl* decl = setup.path_for(mode);
    if (!decl) return;
    const Point& end = start ? decl->path.points.front() : decl->path.points.back();
    if (!near(end, vertex)) {
      warning(line, "path of " + quoted(mode) + (start ? " does not start" : " does not end") +
                        " at this vertex");
    }
  };

  for (const Event& event : setup.events) {
    if (const auto* bs = std::get_if<BeamSplitterEvent>(&event.action)) {
      used.insert(bs->mode_a);
      used.insert(bs->mode_b);
      if (kind_of(bs->mode_a) != kind_of(bs->mode_b)) {
        error(event.line, "beam splitter mixes " + std::string(to_string(kind_of(bs->mode_a))) +
                              " and " + std::string(to_string(kind_of(bs->mode_b))) + " modes");
      }
      if (!populated.count(bs->mode_a) && !populated.count(bs->mode_b)) {
        error(event.line, "beam splitter on modes that nothing has populated");
      }
      populated.insert(bs->mode_a);
      populated.insert(bs->mode_b);
    } else if (const auto* create = std::get_if<PairCreateEvent>(&event.action)) {
      used.insert({create->photon, create->electron, create->hole});
      require_kind(event.line, create->photon, ModeKind::photon, "pair source");
      require_kind(event.line, create->electron, ModeKind::electron, "electron");
      require_kind(event.line, create->hole, ModeKind::hole, "hole");
      require_populated(event.line, create->photon);
      check_end(event.line, create->electron, create->position, true);
      check_end(event.line, create->hole, create->position, true);
      populated.insert(create->electron);
      populated.insert(create->hole);
    } else {
      const auto& annih = std::get<PairAnnihilateEvent>(event.action);
      used.insert({annih.photon, annih.electron, annih.hole});
      require_kind(event.line, annih.photon, ModeKind::photon, "pair sink");
      require_kind(event.line, annih.electron, ModeKind::electron, "electron");
      require_kind(event.line, annih.hole, ModeKind::hole, "hole");
      require_populated(event.line, annih.electron);
      require_populated(event.line, annih.hole);
      check_end(event.line, annih.electron, annih.position, false);
      check_end(event.line, annih.hole, annih.position, false);
      populated.insert(annih.photon);
    }
  }
  for (const DetectDecl& detect : setup.detectors) {
    for (const DetectCondition& condition : detect.keep) used.insert(condition.mode);
  }

  for (const ModeDecl& decl : setup.modes) {
    if (!used.count(decl.mode.name)) {
      warning(decl.line, "mode " + quoted(decl.mode.name) + " is never used");
    } else if (is_fermionic(decl.mode.kind) && !setup.path_for(decl.mode.name)) {
      warning(decl.line, "charged mode " + quoted(decl.mode.name) +
                             " has no path and collects no AB phase");
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  return out;
}

std::string format(const Setup& setup) {
  std::ostringstream out;
  const auto num = format_number;
  for (const FluxonDecl& decl : setup.fluxons) {
    const Fluxon& f = decl.fluxon;
    out << "fluxon " << f.name << ' ' << num(f.position.x()) << ' ' << num(f.position.y()) << ' '
        << num(f.alpha) << '\n';
  }
  for (const ModeDecl& decl : setup.modes) {
    out << "mode " << decl.mode.name << ' ' << to_string(decl.mode.kind);
    if (decl.mode.max_occupancy != 1) out << ' ' << decl.mode.max_occupancy;
    out << '\n';
  }
  for (const SourceDecl& decl : setup.sources) {
    out << "source " << decl.mode << ' ' << num(decl.position.x()) << ' ' << num(decl.position.y())
        << ' ' << decl.occupancy << '\n';
  }
  for (const PathDecl& decl : setup.paths) {
    out << "path " << decl.mode;
    for (const Point& p : decl.path.points) out << ' ' << num(p.x()) << ' ' << num(p.y());
    out << '\n';
  }
  for (const Event& event : setup.events) {
    if (const auto* bs = std::get_if<BeamSplitterEvent>(&event.action)) {
      out << "bs " << bs->mode_a << ' ' << bs->mode_b << '\n';
    } else if (const auto* c = std::get_if<PairCreateEvent>(&event.action)) {
      out << "create " << c->photon << " -> " << c->electron << ' ' << c->hole << " @ "
          << num(c->position.x()) << ' ' << num(c->position.y()) << '\n';
    } else {
      const auto& a = std::get<PairAnnihilateEvent>(event.action);
      out << "annih " << a.electron << ' ' << a.hole << " -> " << a.photon << " @ "
          << num(a.position.x()) << ' ' << num(a.position.y()) << '\n';
    }
  }
  for (const DetectDecl& decl : setup.detectors) {
    out << "detect keep";
    for (const DetectCondition& c : decl.keep) out << ' ' << c.mode << '=' << c.occupancy;
    out << '\n';
  }
  return out.str();
}

AlphaOverrides uniform_alpha(const Setup& setup, double alpha) {
  AlphaOverrides overrides;
  for (const FluxonDecl& decl : setup.fluxons) overrides[decl.fluxon.name] = alpha;
  return overrides;
}

ScenarioResult compile(const Setup& setup, const AlphaOverrides& alpha_overrides,
                       const GaugeChoice& gauge) {
  for (const Diagnostic& d : validate(setup)) {
    if (d.severity == Severity::error) throw Error("line " + std::to_string(d.line) + ": " + d.message);
  }
  for (const auto& [name, alpha] : alpha_overrides) {
    const bool known = std::any_of(setup.fluxons.begin(), setup.fluxons.end(),
                                   [&](const FluxonDecl& d) { return d.fluxon.name == name; });
    if (!known) throw Error("alpha override for unknown fluxon '" + name + "'");
  }

  std::vector<Fluxon> fluxons;
  for (const FluxonDecl& decl : setup.fluxons) {
    Fluxon f = decl.fluxon;
    if (auto it = alpha_overrides.find(f.name); it != alpha_overrides.end()) f.alpha = it->second;
    fluxons.push_back(std::move(f));
  }

  ScenarioResult result{zero_state(setup.registry), 0.0, std::nullopt, std::nullopt, gauge,
                        {}, {}, fluxons};
  int current_line = 0;
  try {
    for (const PathDecl& decl : setup.paths) {
      current_line = decl.line;
      result.branch_phases[decl.mode] = ab_phase(decl.path, fluxons, gauge);
      result.particle_paths.push_back({decl.mode, decl.path});
    }
    const auto phase_of = [&](const std::string& mode) {
      auto it = result.branch_phases.find(mode);
      return it == result.branch_phases.end() ? 0.0 : it->second;
    };

    Occupation initial(setup.registry->size(), 0);
    for (const SourceDecl& source : setup.sources) {
      initial[setup.registry->index_of(source.mode)] = static_cast<std::uint8_t>(source.occupancy);
    }
    FockState state = new_state(setup.registry, initial);

    for (const Event& event : setup.events) {
      current_line = event.line;
      if (const auto* bs = std::get_if<BeamSplitterEvent>(&event.action)) {
        state = beam_splitter(state, bs->mode_a, bs->mode_b);
      } else if (const auto* c = std::get_if<PairCreateEvent>(&event.action)) {
        state = pair_split(state, c->photon, c->electron, c->hole, VertexPhase{0.0});
      } else {
        const auto& a = std::get<PairAnnihilateEvent>(event.action);
        state = pair_recombine(state, a.electron, a.hole, a.photon,
                               VertexPhase{phase_of(a.electron) + phase_of(a.hole)});
      }
    }

    if (setup.detectors.empty()) {
      result.postselection_probability = state.norm_squared();
      result.final_state = state.normalized();
    } else {
      current_line = setup.detectors.front().line;
      std::vector<std::pair<std::size_t, int>> conditions;
      for (const DetectDecl& detect : setup.detectors) {
        for (const DetectCondition& c : detect.keep) {
          conditions.emplace_back(setup.registry->index_of(c.mode), c.occupancy);
        }
      }
      Postselection selected = postselect(state, [conditions](const Occupation& occupation) {
        return std::all_of(conditions.begin(), conditions.end(), [&](const auto& c) {
          return occupation[c.first] == c.second;
        });
      });
      result.final_state = std::move(selected.state);
      result.postselection_probability = selected.probability;
    }
  } catch (const Error& e) {
    throw Error("line " + std::to_string(current_line) + ": " + e.what());
  }

  if (auto kets = ordered_ket_pair(result.final_state)) {
    result.relative_phase = relative_phase(result.final_state, kets->first, kets->second);
    result.phase_kets = std::move(kets);
  }
  return result;
}

}  // namespace ab::dsl
