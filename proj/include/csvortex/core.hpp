#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace csvortex {

inline constexpr double kPi    = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// 2-vector in the plane / on the torus.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double a, Vec2 v) { return v * a; }

/// Reduce a coordinate difference to the fundamental cell [-1/2, 1/2).
inline double wrap_half(double t) {
  t -= std::round(t);
  if (t >= 0.5) t -= 1.0;   // round-to-even can land exactly on +0.5
  return t;
}

/// Difference x - y reduced to [-1/2, 1/2)^2 (nearest periodic image).
inline Vec2 torus_diff(Vec2 x, Vec2 y) {
  return {wrap_half(x.x - y.x), wrap_half(x.y - y.y)};
}

/// Distance on the unit torus.
inline double torus_dist(Vec2 x, Vec2 y) { return torus_diff(x, y).norm(); }

/// Reduce a point into [0, 1)^2.
inline Vec2 wrap_unit(Vec2 p) {
  double u = p.x - std::floor(p.x);
  double v = p.y - std::floor(p.y);
  if (u >= 1.0) u = 0.0;
  if (v >= 1.0) v = 0.0;
  return {u, v};
}

}  // namespace csvortex
