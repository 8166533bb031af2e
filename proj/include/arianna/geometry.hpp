#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace arianna {

/// Point or vector on the floor plane, meters. x east, y north.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
/// Unit vector at angle `rad`, counter-clockwise from +x.
inline Vec2 heading_vector(double rad) { return {std::cos(rad), std::sin(rad)}; }
/// Counter-clockwise perpendicular (the left side when facing along `a`).
constexpr Vec2 left_normal(Vec2 a) { return {-a.y, a.x}; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double rad);

struct Bounds {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Closest point on segment [a, b] to p.
Vec2 closest_on_segment(Vec2 p, Vec2 a, Vec2 b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

double polyline_length(std::span<const Vec2> pts);
/// Point at arc length `s` along the polyline (clamped to its ends).
Vec2 point_at_arclength(std::span<const Vec2> pts, double s);
/// Unit tangent of the segment containing arc length `s`.
Vec2 tangent_at_arclength(std::span<const Vec2> pts, double s);

/// Rounds to the millimetre grid used by the deployment file format.
inline double round_mm(double v) { return std::round(v * 1000.0) / 1000.0; }
inline Vec2 round_mm(Vec2 v) { return {round_mm(v.x), round_mm(v.y)}; }

}  // namespace arianna
