#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Permutation-invariant sum: sorting by value first makes the result depend
/// only on the multiset of samples, so rearranged fields reduce bit-identically.
inline double stable_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// Real samples of a periodic scalar on the unit torus. samples[i*n + j] is the
/// value at the node (i/n, j/n); the first index runs along x, the second along y.
struct ScalarField {
  int n = 0;
  std::vector<double> samples;
  double mean = 0.0;
  bool zero_mean = false;

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }
  double at(int i, int j) const { return samples[idx(i, j)]; }
  double& at(int i, int j) { return samples[idx(i, j)]; }
};

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.samples) m = std::max(m, std::abs(v));
  return m;
}

/// Zero-mean gauge tolerance: machine-level relative to max(1, L-inf).
inline double zero_mean_tolerance(const ScalarField& f) {
  return 1e-12 * std::max(1.0, max_abs(f));
}

inline bool has_zero_mean(const ScalarField& f) {
  return std::abs(f.mean) <= zero_mean_tolerance(f);
}

inline ScalarField make_field(int n, std::vector<double> samples,
                              bool enforce_zero_mean = false) {
  if (!is_pow2(n) || n < 8)
    throw std::invalid_argument("make_field: resolution must be a power of two >= 8, got " +
                                std::to_string(n));
  if (samples.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("make_field: sample count does not match resolution");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("make_field: non-finite sample");

  ScalarField f;
  f.n = n;
  f.samples = std::move(samples);
  f.mean = stable_sum(f.samples) / (static_cast<double>(n) * n);
  if (enforce_zero_mean) {
    for (double& v : f.samples) v -= f.mean;
    f.mean = stable_sum(f.samples) / (static_cast<double>(n) * n);
  }
  f.zero_mean = has_zero_mean(f);
  return f;
}

/// Discrete L^p quadrature norm, (1/n^2 sum |f|^p)^{1/p}; p = inf returns max|f|.
inline double lp_norm(const ScalarField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return max_abs(f);
  std::vector<double> v(f.samples.size());
  if (p == 1.0) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f.samples[i]);
  } else if (p == 2.0) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.samples[i] * f.samples[i];
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(f.samples[i]), p);
  }
  double s = stable_sum(std::move(v)) / (static_cast<double>(f.n) * f.n);
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

inline double linf_norm(const ScalarField& f) { return max_abs(f); }

/// f_lambda(x) = f(x/lambda) with lambda = 1/m: an exact relabeling of samples.
/// Output node (i/n, j/n) takes the input value at ((i*m mod n)/n, (j*m mod n)/n).
inline ScalarField rescale(const ScalarField& f, int m) {
  if (m < 1 || f.n % m != 0)
    throw std::invalid_argument("rescale: m must be a positive divisor of the resolution");
  if (m == 1) return f;
  ScalarField g;
  g.n = f.n;
  g.samples.resize(f.samples.size());
  for (int i = 0; i < f.n; ++i) {
    const int si = (i * m) % f.n;
    for (int j = 0; j < f.n; ++j) {
      const int sj = (j * m) % f.n;
      g.samples[g.idx(i, j)] = f.at(si, sj);
    }
  }
  g.mean = f.mean;  // sample multiset is preserved up to multiplicity
  g.mean = stable_sum(g.samples) / (static_cast<double>(g.n) * g.n);
  g.zero_mean = has_zero_mean(g);
  return g;
}

}  // namespace mixlab
