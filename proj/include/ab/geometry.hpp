#pragma once

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace ab {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Vec2<double>;

// Absolute tolerance for coincidence tests, in dimensionless layout units.
inline constexpr double kGeometryTolerance = 1e-12;

template <typename Derived1, typename Derived2>
auto cross2(const Eigen::MatrixBase<Derived1>& u, const Eigen::MatrixBase<Derived2>& v) {
  return u.x() * v.y() - u.y() * v.x();
}

// Signed angle from u to v in (-pi, pi]; positive is counter-clockwise.
template <typename Scalar>
Scalar signed_angle(const Vec2<Scalar>& u, const Vec2<Scalar>& v) {
  using std::atan2;
  return atan2(cross2(u, v), u.dot(v));
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a,
                              const Vec2<Scalar>& b) {
  const Vec2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - a).norm();
  Scalar t = (p - a).dot(ab) / len2;
  t = t < Scalar(0) ? Scalar(0) : (t > Scalar(1) ? Scalar(1) : t);
  return (p - (a + t * ab)).norm();
}

// Angle subtended at `center` by the segment a -> b.
template <typename Scalar>
Scalar subtended_angle(const Vec2<Scalar>& center, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return signed_angle<Scalar>(a - center, b - center);
}

/// Point flux tube. alpha is the flux in units of hc/e, so a unit charge
/// completing one counter-clockwise loop collects 2 pi alpha.
struct Fluxon {
  std::string name;
  Point position = Point::Zero();
  double alpha = 0.0;
};

struct SubtendedAngleGauge {
  friend bool operator==(const SubtendedAngleGauge&, const SubtendedAngleGauge&) = default;
};

// Vector potential concentrated on a ray leaving each fluxon. One direction
// per fluxon, or a single direction shared by all of them.
struct SingularCutGauge {
  std::vector<Point> directions;
};

using GaugeChoice = std::variant<SubtendedAngleGauge, SingularCutGauge>;

SingularCutGauge singular_cut_from_angles(std::span<const double> angles);
SingularCutGauge singular_cut_from_angle(double angle);
std::string describe(const GaugeChoice& gauge);

/// Planar polyline traced by one charged particle. charge_sign is -1 for an
/// electron and +1 for a hole or positron.
struct ParticlePath {
  int charge_sign = -1;
  std::vector<Point> points;

  bool is_closed() const;
};

// Checks the path record itself: charge sign, at least two points, no repeated
// consecutive points.
void validate_path(const ParticlePath& path);

ParticlePath reversed(const ParticlePath& path);
// Joins b onto a; b must start where a ends.
ParticlePath concatenate(const ParticlePath& a, const ParticlePath& b);
// Appends the straight segment from the last point back to the first.
ParticlePath closed_by_chord(const ParticlePath& path);

// Total signed angle swept around `point`. Throws "singular trajectory" when
// the polyline passes through the point.
double total_subtended_angle(const ParticlePath& path, const Point& point);

// Phase collected along the path, summed over fluxons:
// charge_sign * 2 pi alpha * w, where w is the signed cut-crossing count or the
// subtended angle over 2 pi. Closed paths give the same value in both gauges.
double ab_phase(const ParticlePath& path, std::span<const Fluxon> fluxons,
                const GaugeChoice& gauge);

int winding_number(const ParticlePath& path, const Point& point);

// Signed transversal crossings of the ray from the fluxon along cut_direction.
// +1 when the fluxon is on the particle's left.
int cut_crossings(const ParticlePath& path, const Fluxon& fluxon, const Point& cut_direction);

// Winding numbers around `point` of every closed sub-loop of the polyline:
// loops cut out at self-intersections, and the whole path when it is closed.
// A path with all entries zero never closes a loop around the point.
std::vector<int> subloop_windings(const ParticlePath& path, const Point& point);

bool encircles(const ParticlePath& path, const Point& point);

// Polyline approximation of a circular arc; every point lies on the circle.
std::vector<Point> arc_points(const Point& center, double radius, double from_angle,
                              double to_angle, int segments);

}  // namespace ab
