#pragma once

// Test-only oracles, independent of the library's computation paths:
// a direct O(n^4) discrete Fourier transform, direct ball-sum averages,
// a direct radius scan for the geometric mixing scale, and the analytic
// odd-mode sum for the dyadic checkerboard's mix norm.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mixlab/mixing.hpp"
#include "mixlab/scalar_field.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Direct DFT with the (1/n^2)-forward convention; O(n^4).
inline std::complex<double> dft_coeff(const mixlab::ScalarField& f, int k1, int k2) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) {
      const double phase = -2.0 * kPi * (static_cast<double>(k1) * i + static_cast<double>(k2) * j) / f.n;
      acc += f.at(i, j) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  return acc / (static_cast<double>(f.n) * f.n);
}

/// Direct ball average at a single node, by brute-force membership scan.
inline double ball_average(const mixlab::ScalarField& f, int ci, int cj, double r) {
  const long long r2 =
      static_cast<long long>(std::floor(r * f.n * r * f.n + 1e-9));
  double acc = 0.0;
  long long count = 0;
  for (int a = 0; a < f.n; ++a) {
    const long long da = std::min(std::abs(a - ci), f.n - std::abs(a - ci));
    for (int b = 0; b < f.n; ++b) {
      const long long db = std::min(std::abs(b - cj), f.n - std::abs(b - cj));
      if (da * da + db * db <= r2) {
        acc += f.at(a, b);
        ++count;
      }
    }
  }
  return acc / static_cast<double>(count);
}

/// Direct geometric-mixing-scale scan (no FFT anywhere).
inline mixlab::MixScale mix_g_direct(const mixlab::ScalarField& f, double kappa_prime) {
  const double linf = mixlab::linf_norm(f);
  mixlab::MixScale res;
  res.bracket = 1.0 / f.n;
  if (linf == 0.0) return res;
  for (int jr = 1; jr <= f.n / 2; ++jr) {
    const double r = static_cast<double>(jr) / f.n;
    double worst = 0.0;
    for (int i = 0; i < f.n; ++i)
      for (int j = 0; j < f.n; ++j)
        worst = std::max(worst, std::abs(ball_average(f, i, j, r)));
    if (worst <= kappa_prime * linf + 1e-12 * linf) {
      res.epsilon = r;
      return res;
    }
  }
  res.epsilon = 0.5;
  res.saturated = true;
  return res;
}

/// Analytic mix norm of the level-0 checkerboard by direct double summation
/// over odd modes with coefficient modulus 2/(pi k) per axis.
inline double checkerboard_mixf_direct(int kmax = 4001) {
  double acc = 0.0;
  for (int k1 = kmax; k1 >= 1; k1 -= 2)
    for (int k2 = kmax; k2 >= 1; k2 -= 2) {
      const double c1 = 2.0 / (kPi * k1);
      const double c2 = 2.0 / (kPi * k2);
      acc += c1 * c1 * c2 * c2 /
             (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
    }
  return std::sqrt(4.0 * acc);  // four sign quadrants
}

/// Random band-limited field: modes with |k|_inf <= kmax, reproducible seed.
inline mixlab::ScalarField random_band_limited(int n, int kmax, std::uint64_t seed,
                                               int mode_count = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_k(-kmax, kmax);
  std::uniform_real_distribution<double> pick_a(-1.0, 1.0);
  std::uniform_real_distribution<double> pick_phi(0.0, 2.0 * kPi);
  struct Mode {
    int k1, k2;
    double a, phi;
  };
  std::vector<Mode> modes;
  while (static_cast<int>(modes.size()) < mode_count) {
    Mode m{pick_k(rng), pick_k(rng), pick_a(rng), pick_phi(rng)};
    if (m.k1 == 0 && m.k2 == 0) continue;
    modes.push_back(m);
  }
  std::vector<double> samples(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      double v = 0.0;
      for (const auto& m : modes)
        v += m.a * std::cos(2.0 * kPi * (m.k1 * x + m.k2 * y) + m.phi);
      samples[static_cast<std::size_t>(i) * n + j] = v;
    }
  return mixlab::make_field(n, std::move(samples), /*enforce_zero_mean=*/true);
}

}  // namespace oracle
