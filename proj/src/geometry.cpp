#include "ab/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <sstream>

#include "ab/error.hpp"

namespace ab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_not_singular(const ParticlePath& path, const Point& point) {
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    if (point_segment_distance<double>(point, path.points[i], path.points[i + 1]) <=
        kGeometryTolerance) {
      std::ostringstream msg;
      msg << "singular trajectory: segment " << i << " passes through (" << point.x() << ", "
          << point.y() << ")";
      throw Error(msg.str());
    }
  }
}

const Point& direction_for(const SingularCutGauge& gauge, std::size_t fluxon_index,
                           std::size_t fluxon_count) {
  if (gauge.directions.size() == 1) return gauge.directions.front();
  if (gauge.directions.size() != fluxon_count) {
    throw Error("singular cut gauge has " + std::to_string(gauge.directions.size()) +
                " directions for " + std::to_string(fluxon_count) + " fluxons");
  }
  return gauge.directions[fluxon_index];
}

struct SegmentHit {
  double s = 0.0;  // parameter on the first segment
  double t = 0.0;  // parameter on the second segment
  Point point;
};

std::optional<SegmentHit> intersect_segments(const Point& p0, const Point& p1, const Point& q0,
                                             const Point& q1) {
  const Point r = p1 - p0;
  const Point s = q1 - q0;
  const double denom = cross2(r, s);
  if (std::abs(denom) <= kGeometryTolerance * r.norm() * s.norm()) return std::nullopt;
  const Point qp = q0 - p0;
  const double u = cross2(qp, s) / denom;
  const double v = cross2(qp, r) / denom;
  const double eps = 1e-12;
  if (u < -eps || u > 1.0 + eps || v < -eps || v > 1.0 + eps) return std::nullopt;
  return SegmentHit{u, v, p0 + u * r};
}

}  // namespace

SingularCutGauge singular_cut_from_angles(std::span<const double> angles) {
  SingularCutGauge gauge;
  for (double a : angles) gauge.directions.emplace_back(std::cos(a), std::sin(a));
  return gauge;
}

SingularCutGauge singular_cut_from_angle(double angle) {
  const double angles[] = {angle};
  return singular_cut_from_angles(angles);
}

std::string describe(const GaugeChoice& gauge) {
  if (std::holds_alternative<SubtendedAngleGauge>(gauge)) return "angle";
  std::ostringstream out;
  out << "cut";
  for (const Point& d : std::get<SingularCutGauge>(gauge).directions) {
    out << ':' << std::atan2(d.y(), d.x());
  }
  return out.str();
}

bool ParticlePath::is_closed() const {
  return points.size() >= 3 && (points.front() - points.back()).norm() <= kGeometryTolerance;
}

void validate_path(const ParticlePath& path) {
  if (path.charge_sign != -1 && path.charge_sign != 1) {
    throw Error("particle path charge_sign must be -1 or +1");
  }
  if (path.points.size() < 2) throw Error("particle path needs at least two points");
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    if ((path.points[i + 1] - path.points[i]).norm() <= kGeometryTolerance) {
      throw Error("particle path has repeated consecutive point at index " +
                  std::to_string(i + 1));
    }
    if (!path.points[i].allFinite()) throw Error("particle path has a non-finite point");
  }
}

ParticlePath reversed(const ParticlePath& path) {
  ParticlePath out = path;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

ParticlePath concatenate(const ParticlePath& a, const ParticlePath& b) {
  if (a.charge_sign != b.charge_sign) throw Error("cannot join paths of different charge");
  if (a.points.empty() || b.points.empty() ||
      (a.points.back() - b.points.front()).norm() > kGeometryTolerance) {
    throw Error("cannot join paths: endpoints do not meet");
  }
  ParticlePath out = a;
  out.points.insert(out.points.end(), b.points.begin() + 1, b.points.end());
  return out;
}

ParticlePath closed_by_chord(const ParticlePath& path) {
  ParticlePath out = path;
  if (!path.is_closed()) out.points.push_back(path.points.front());
  return out;
}

double total_subtended_angle(const ParticlePath& path, const Point& point) {
  validate_path(path);
  check_not_singular(path, point);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    sum += subtended_angle<double>(point, path.points[i], path.points[i + 1]);
  }
  return sum;
}

int cut_crossings(const ParticlePath& path, const Fluxon& fluxon, const Point& cut_direction) {
  validate_path(path);
  check_not_singular(path, fluxon.position);
  if (std::abs(cut_direction.norm() - 1.0) > 1e-9) throw Error("cut direction must be a unit vector");

  auto degenerate = [&](std::size_t i) {
    throw Error("degenerate crossing: vertex " + std::to_string(i) + " lies on the cut of fluxon '" +
                fluxon.name + "'");
  };

  int count = 0;
  for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
    const Point u = path.points[i] - fluxon.position;
    const Point w = path.points[i + 1] - fluxon.position;
    const double side_u = cross2(cut_direction, u);
    const double side_w = cross2(cut_direction, w);
    const bool on_line_u = std::abs(side_u) <= kGeometryTolerance;
    const bool on_line_w = std::abs(side_w) <= kGeometryTolerance;
    if (on_line_u && cut_direction.dot(u) >= -kGeometryTolerance) degenerate(i);
    if (on_line_w && cut_direction.dot(w) >= -kGeometryTolerance) degenerate(i + 1);
    if (on_line_u || on_line_w) continue;
    if ((side_u > 0.0) == (side_w > 0.0)) continue;
    const double s = side_u / (side_u - side_w);
    const Point hit = u + s * (w - u);
    const double t = cut_direction.dot(hit);
    if (t > kGeometryTolerance) count += (side_w > side_u) ? 1 : -1;
  }
  return count;
}

double ab_phase(const ParticlePath& path, std::span<const Fluxon> fluxons,
                const GaugeChoice& gauge) {
  validate_path(path);
  double phase = 0.0;
  for (std::size_t k = 0; k < fluxons.size(); ++k) {
    const Fluxon& fluxon = fluxons[k];
    double winding = 0.0;
    if (const auto* cut = std::get_if<SingularCutGauge>(&gauge)) {
      winding = cut_crossings(path, fluxon, direction_for(*cut, k, fluxons.size()));
    } else {
      winding = total_subtended_angle(path, fluxon.position) / kTwoPi;
    }
    phase += path.charge_sign * kTwoPi * fluxon.alpha * winding;
  }
  return phase;
}

int winding_number(const ParticlePath& path, const Point& point) {
  if (!path.is_closed()) throw Error("winding number needs a closed path");
  double turns = 0.0;
  try {
    turns = total_subtended_angle(path, point) / kTwoPi;
  } catch (const Error&) {
    throw Error("winding number undefined: point lies on the path");
  }
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) >= 1e-9) {
    throw Error("winding number did not converge to an integer");
  }
  return static_cast<int>(rounded);
}

std::vector<int> subloop_windings(const ParticlePath& path, const Point& point) {
  validate_path(path);
  check_not_singular(path, point);
  const auto& pts = path.points;
  const std::size_t segments = pts.size() - 1;
  std::vector<int> windings;

  auto loop_winding = [&](const std::vector<Point>& loop) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
      if ((loop[i + 1] - loop[i]).norm() <= kGeometryTolerance) continue;
      sum += subtended_angle<double>(point, loop[i], loop[i + 1]);
    }
    return static_cast<int>(std::round(sum / kTwoPi));
  };

  for (std::size_t i = 0; i < segments; ++i) {
    for (std::size_t j = i + 2; j < segments; ++j) {
      auto hit = intersect_segments(pts[i], pts[i + 1], pts[j], pts[j + 1]);
      if (!hit) continue;
      std::vector<Point> loop{hit->point};
      for (std::size_t k = i + 1; k <= j; ++k) loop.push_back(pts[k]);
      loop.push_back(hit->point);
      windings.push_back(loop_winding(loop));
    }
  }
  if (path.is_closed() && segments < 3) windings.push_back(loop_winding(pts));
  return windings;
}

bool encircles(const ParticlePath& path, const Point& point) {
  for (int w : subloop_windings(path, point)) {
    if (w != 0) return true;
  }
  return false;
}

std::vector<Point> arc_points(const Point& center, double radius, double from_angle,
                              double to_angle, int segments) {
  if (segments < 1) throw Error("arc needs at least one segment");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(segments) + 1);
  for (int k = 0; k <= segments; ++k) {
    const double a = from_angle + (to_angle - from_angle) * k / segments;
    out.push_back(center + radius * Point(std::cos(a), std::sin(a)));
  }
  return out;
}

}  // namespace ab
