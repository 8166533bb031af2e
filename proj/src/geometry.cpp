#include "arianna/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace arianna {

double wrap_angle(double rad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r <= -std::numbers::pi) {
    r += two_pi;
  } else if (r > std::numbers::pi) {
    r -= two_pi;
  }
  return r;
}

Vec2 closest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) {
    return a;
  }
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  if (t <= 0.0) return distance(p, a);
  if (t >= 1.0) return distance(p, b);
  // Perpendicular distance; exact for points on an axis-aligned segment.
  return std::abs(cross(ab, p - a)) / std::sqrt(len2);
}

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const double d1 = cross(a1 - a0, b0 - a0);
  const double d2 = cross(a1 - a0, b1 - a0);
  const double d3 = cross(b1 - b0, a0 - b0);
  const double d4 = cross(b1 - b0, a1 - b0);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return 0.0;
  }
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double polyline_length(std::span<const Vec2> pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += distance(pts[i - 1], pts[i]);
  }
  return total;
}

namespace {

// Index of the segment holding arc length s, and the offset into it.
std::pair<std::size_t, double> locate(std::span<const Vec2> pts, double s) {
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double len = distance(pts[i - 1], pts[i]);
    if (s <= acc + len || i + 1 == pts.size()) {
      return {i - 1, std::clamp(s - acc, 0.0, len)};
    }
    acc += len;
  }
  return {0, 0.0};
}

}  // namespace

Vec2 point_at_arclength(std::span<const Vec2> pts, double s) {
  if (pts.size() < 2) {
    return pts.empty() ? Vec2{} : pts.front();
  }
  const auto [seg, off] = locate(pts, std::max(0.0, s));
  const Vec2 d = pts[seg + 1] - pts[seg];
  const double len = norm(d);
  return len > 0.0 ? pts[seg] + d * (off / len) : pts[seg];
}

Vec2 tangent_at_arclength(std::span<const Vec2> pts, double s) {
  if (pts.size() < 2) {
    return {1.0, 0.0};
  }
  const auto [seg, off] = locate(pts, std::max(0.0, s));
  (void)off;
  const Vec2 d = pts[seg + 1] - pts[seg];
  const double len = norm(d);
  return len > 0.0 ? d * (1.0 / len) : Vec2{1.0, 0.0};
}

}  // namespace arianna
