#pragma once

#include <array>
#include <cmath>

#include "mixlab/geometry.hpp"
#include "mixlab/scalar_field.hpp"

namespace mixlab {

enum class Interp { bicubic, bilinear };

namespace detail {

// Catmull-Rom weights; at s = 0 they reduce to (0, 1, 0, 0) exactly, so
// sampling at a node reproduces the stored value bit-for-bit.
inline std::array<double, 4> catmull_rom(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {0.5 * (-s3 + 2.0 * s2 - s), 0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
          0.5 * (-3.0 * s3 + 4.0 * s2 + s), 0.5 * (s3 - s2)};
}

inline int wrap_index(int n, int i) {
  int w = i % n;
  return w < 0 ? w + n : w;
}

}  // namespace detail

/// Periodic interpolation of a field at an arbitrary torus point.
inline double interpolate(const ScalarField& f, Vec2 p, Interp kind = Interp::bicubic) {
  const int n = f.n;
  const double gx = wrap01(p.x) * n;
  const double gy = wrap01(p.y) * n;
  const int ix = static_cast<int>(std::floor(gx));
  const int iy = static_cast<int>(std::floor(gy));
  const double fx = gx - ix;
  const double fy = gy - iy;

  if (kind == Interp::bilinear) {
    const int ix1 = detail::wrap_index(n, ix + 1);
    const int iy1 = detail::wrap_index(n, iy + 1);
    const int ix0 = detail::wrap_index(n, ix);
    const int iy0 = detail::wrap_index(n, iy);
    return (1.0 - fx) * ((1.0 - fy) * f.at(ix0, iy0) + fy * f.at(ix0, iy1)) +
           fx * ((1.0 - fy) * f.at(ix1, iy0) + fy * f.at(ix1, iy1));
  }

  const auto wx = detail::catmull_rom(fx);
  const auto wy = detail::catmull_rom(fy);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int i = detail::wrap_index(n, ix - 1 + a);
    double row = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int j = detail::wrap_index(n, iy - 1 + b);
      row += wy[b] * f.at(i, j);
    }
    acc += wx[a] * row;
  }
  return acc;
}

}  // namespace mixlab
