#include <cmath>
#include <numbers>
#include <vector>

#include "arianna/geometry.hpp"
#include "arianna/rng.hpp"
#include "doctest.h"

using namespace arianna;

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double w = wrap_angle(a);
    CHECK(w > -std::numbers::pi);
    CHECK(w <= std::numbers::pi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
    CHECK(std::sin(w) == doctest::Approx(std::sin(a)));
  }
}

TEST_CASE("point to segment distance") {
  CHECK(point_segment_distance({0.5, 0.3}, {0, 0}, {1, 0}) == doctest::Approx(0.3));
  CHECK(point_segment_distance({2, 0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({0, 0}, {0, 0}, {0, 0}) == 0.0);
  // Against dense sampling of the segment.
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const Vec2 a{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 b{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    double best = 1e9;
    for (int k = 0; k <= 20000; ++k) best = std::min(best, distance(p, a + (b - a) * (k / 20000.0)));
    CHECK(point_segment_distance(p, a, b) == doctest::Approx(best).epsilon(1e-3));
  }
}

TEST_CASE("segment to segment distance is zero for crossings") {
  CHECK(segment_segment_distance({0, 0}, {2, 2}, {0, 2}, {2, 0}) == 0.0);
  CHECK(segment_segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("arc length helpers") {
  const std::vector<Vec2> pl{{0, 0}, {3, 0}, {3, 4}};
  CHECK(polyline_length(pl) == doctest::Approx(7.0));
  CHECK(point_at_arclength(pl, 1.0) == Vec2{1, 0});
  const Vec2 p = point_at_arclength(pl, 5.0);
  CHECK(p.x == doctest::Approx(3.0));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK(point_at_arclength(pl, 100.0) == Vec2{3, 4});
  CHECK(tangent_at_arclength(pl, 5.0).y == doctest::Approx(1.0));
  CHECK(round_mm(1.23456) == doctest::Approx(1.235));
}

TEST_CASE("rng streams repeat for equal seeds") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(1);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(mix64(1) != mix64(2));
}
