#pragma once

#include <cmath>

namespace mixlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Wrap a cover coordinate into [0, 1).
inline double wrap01(double x) {
  double w = x - std::floor(x);
  return w == 1.0 ? 0.0 : w;
}

inline Vec2 wrap01(const Vec2& p) { return {wrap01(p.x), wrap01(p.y)}; }

/// Distance on the torus: minimum over integer lattice translates.
inline double torus_dist1(double a, double b) {
  double d = std::abs(wrap01(a) - wrap01(b));
  return std::min(d, 1.0 - d);
}

inline double torus_dist(const Vec2& p, const Vec2& q) {
  return std::hypot(torus_dist1(p.x, q.x), torus_dist1(p.y, q.y));
}

}  // namespace mixlab
