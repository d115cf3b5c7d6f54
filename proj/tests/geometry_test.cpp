#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ab/error.hpp"
#include "ab/geometry.hpp"

using namespace ab;

namespace {

const double kPi = std::numbers::pi;

ParticlePath circle(int charge, double from, double to, int segments = 16) {
  return ParticlePath{charge, arc_points(Point::Zero(), 1.0, from, to, segments)};
}

// Random star-shaped polygon around `center`, closed, with `turns` windings.
ParticlePath random_loop(std::mt19937_64& rng, const Point& center, int turns) {
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  std::vector<Point> points;
  const int n = 7 * std::abs(turns) + 5;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * turns * k / n + 0.013;
    points.push_back(center + radius(rng) * Point(std::cos(a), std::sin(a)));
  }
  points.push_back(points.front());
  return ParticlePath{1, points};
}

}  // namespace

TEST_CASE("subtended angle and signed angle") {
  CHECK(signed_angle<double>(Point(1, 0), Point(0, 1)) == doctest::Approx(kPi / 2));
  CHECK(signed_angle<double>(Point(0, 1), Point(1, 0)) == doctest::Approx(-kPi / 2));
  CHECK(subtended_angle<double>(Point(1, 1), Point(2, 1), Point(1, 2)) == doctest::Approx(kPi / 2));
  CHECK(point_segment_distance<double>(Point(0, 1), Point(-1, 0), Point(1, 0)) == doctest::Approx(1.0));
  CHECK(signed_angle<long double>(Vec2<long double>(1, 0), Vec2<long double>(-1, 1e-30L)) > 3.14L);
}

TEST_CASE("full counter-clockwise loop collects charge times 2 pi alpha") {
  const std::vector<Fluxon> flux{{"F", Point::Zero(), 0.3}};
  const ParticlePath hole = circle(+1, 0.0, 2.0 * kPi);
  const ParticlePath electron = circle(-1, 0.0, 2.0 * kPi);
  CHECK(ab_phase(hole, flux, SubtendedAngleGauge{}) == doctest::Approx(2.0 * kPi * 0.3));
  CHECK(ab_phase(electron, flux, SubtendedAngleGauge{}) == doctest::Approx(-2.0 * kPi * 0.3));
  CHECK(ab_phase(hole, flux, singular_cut_from_angle(0.4)) == doctest::Approx(2.0 * kPi * 0.3));
  CHECK(winding_number(hole, Point::Zero()) == 1);
  CHECK(winding_number(reversed(hole), Point::Zero()) == -1);
  CHECK(winding_number(hole, Point(3, 0)) == 0);
  CHECK(encircles(hole, Point::Zero()));
}

TEST_CASE("open paths depend on the gauge, closed combinations do not") {
  const std::vector<Fluxon> flux{{"F", Point::Zero(), 0.25}};
  const ParticlePath quarter = circle(+1, 0.0, kPi / 2, 4);
  CHECK(ab_phase(quarter, flux, SubtendedAngleGauge{}) == doctest::Approx(kPi / 8));
  CHECK(ab_phase(quarter, flux, singular_cut_from_angle(1.0)) == doctest::Approx(2.0 * kPi * 0.25));
  CHECK(ab_phase(quarter, flux, singular_cut_from_angle(2.0)) == doctest::Approx(0.0));
}

TEST_CASE("cut crossings are signed by the side of the fluxon") {
  const Fluxon f{"F", Point::Zero(), 1.0};
  const ParticlePath up{1, {Point(1, -1), Point(1, 1)}};
  CHECK(cut_crossings(up, f, Point(1, 0)) == 1);
  CHECK(cut_crossings(reversed(up), f, Point(1, 0)) == -1);
  CHECK(cut_crossings(up, f, Point(-1, 0)) == 0);
  const ParticlePath touching{1, {Point(1, 0), Point(1, 1)}};
  CHECK_THROWS_WITH_AS(cut_crossings(touching, f, Point(1, 0)), doctest::Contains("degenerate"), Error);
}

TEST_CASE("degenerate geometry is rejected") {
  const std::vector<Fluxon> flux{{"F", Point::Zero(), 0.1}};
  const ParticlePath through{-1, {Point(-1, 0), Point(1, 0)}};
  CHECK_THROWS_WITH_AS(ab_phase(through, flux, SubtendedAngleGauge{}), doctest::Contains("singular"), Error);
  CHECK_THROWS_AS(validate_path(ParticlePath{0, {Point(0, 1), Point(1, 1)}}), Error);
  CHECK_THROWS_AS(validate_path(ParticlePath{1, {Point(0, 1)}}), Error);
  CHECK_THROWS_AS(validate_path(ParticlePath{1, {Point(0, 1), Point(0, 1)}}), Error);
  CHECK_THROWS_AS(winding_number(circle(1, 0.0, kPi), Point::Zero()), Error);
}

TEST_CASE("path helpers") {
  const ParticlePath a = circle(1, 0.0, kPi / 2, 2);
  const ParticlePath b = circle(1, kPi / 2, kPi, 2);
  const ParticlePath joined = concatenate(a, b);
  CHECK(joined.points.size() == 5);
  CHECK_THROWS_AS(concatenate(b, b), Error);
  const ParticlePath closed = closed_by_chord(joined);
  CHECK(closed.is_closed());
  CHECK(winding_number(closed, Point(0, 0.5)) == 1);
  for (const Point& p : arc_points(Point(2, 3), 0.5, 0.1, 2.0, 7)) {
    CHECK((p - Point(2, 3)).norm() == doctest::Approx(0.5));
  }
}

TEST_CASE("sub-loop windings see loops cut out by self-intersections") {
  // Goes once around the origin and then leaves: the first part is a loop.
  std::vector<Point> pts = arc_points(Point::Zero(), 1.0, -kPi / 2 + 0.3, 3.0 * kPi / 2 + 0.6, 24);
  pts.insert(pts.begin(), Point(0.2, -2.0));
  pts.push_back(Point(-0.5, -2.0));
  const ParticlePath lasso{-1, pts};
  const std::vector<int> windings = subloop_windings(lasso, Point::Zero());
  CHECK(std::count(windings.begin(), windings.end(), 1) + std::count(windings.begin(), windings.end(), -1) >= 1);

  const ParticlePath half = circle(-1, kPi / 2, kPi, 4);
  const std::vector<int> none = subloop_windings(half, Point::Zero());
  CHECK(std::all_of(none.begin(), none.end(), [](int w) { return w == 0; }));
}

TEST_CASE("closed loops agree in every gauge and give integer windings") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> offset(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const int turns = 1 + trial % 3;
    const Point center(offset(rng), offset(rng));
    const ParticlePath loop = random_loop(rng, center, turns);
    const std::vector<Fluxon> flux{{"F", Point::Zero(), 0.37}, {"G", Point(5, 5), 0.11}};
    CHECK(winding_number(loop, Point::Zero()) == turns);
    const double reference = ab_phase(loop, flux, SubtendedAngleGauge{});
    CHECK(reference == doctest::Approx(2.0 * kPi * 0.37 * turns).epsilon(1e-12));
    const double cuts[] = {angle(rng), angle(rng)};
    CHECK(ab_phase(loop, flux, singular_cut_from_angles(cuts)) ==
          doctest::Approx(reference).epsilon(1e-12));
  }
}
