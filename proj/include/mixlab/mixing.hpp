#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mixlab/fft.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

/// Geometric mixing-scale answer: smallest qualifying radius, the +-1/n
/// discretization bracket, and whether the scan saturated at 1/2.
struct MixScale {
  double epsilon = 0.0;
  double bracket = 0.0;
  bool saturated = false;
};

struct MixParams {
  double kappa_prime = 1.0 / 3.0;
  std::vector<double> radii;  // strictly increasing, in (0, 1/2]

  static MixParams defaults(int n) {
    MixParams p;
    p.radii.reserve(n / 2);
    for (int j = 1; j <= n / 2; ++j) p.radii.push_back(static_cast<double>(j) / n);
    return p;
  }
};

struct DiskAverageField {
  double radius = 0.0;
  int n = 0;
  std::vector<double> averages;
};

namespace detail {

// Discrete ball membership in integer arithmetic: offset (a,b) belongs to the
// ball of radius r iff wrap(a)^2 + wrap(b)^2 <= floor((r n)^2 + eps).
inline long long ball_radius_sq_cells(int n, double r) {
  const double rc = r * n;
  return static_cast<long long>(std::floor(rc * rc + 1e-9));
}

inline int wrap_offset(int n, int a) { return std::min(a, n - a); }

struct DiskKernelFft {
  long long count = 0;
  std::vector<std::complex<double>> khat;  // unnormalized FFT of the indicator
};

inline DiskKernelFft disk_kernel_fft(int n, double r) {
  const long long r2 = ball_radius_sq_cells(n, r);
  std::vector<std::complex<double>> ind(static_cast<std::size_t>(n) * n, 0.0);
  long long count = 0;
  for (int a = 0; a < n; ++a) {
    const long long da = wrap_offset(n, a);
    for (int b = 0; b < n; ++b) {
      const long long db = wrap_offset(n, b);
      if (da * da + db * db <= r2) {
        ind[static_cast<std::size_t>(a) * n + b] = 1.0;
        ++count;
      }
    }
  }
  DiskKernelFft k;
  k.count = count;
  k.khat.resize(ind.size());
  fft_for(n).forward(ind.data(), k.khat.data());
  return k;
}

// Ball averages from a precomputed zero-mean spectrum. Splitting off the mean
// makes averaging a constant exact; clamping removes convolution roundoff (the
// exact average is a convex combination of samples).
inline std::vector<double> disk_average_from_spectrum(
    int n, const std::vector<std::complex<double>>& fhat_centered, double mean,
    double lo, double hi, const DiskKernelFft& kernel) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  std::vector<std::complex<double>> prod(nn), conv(nn);
  for (std::size_t i = 0; i < nn; ++i) prod[i] = fhat_centered[i] * kernel.khat[i];
  fft_for(n).backward(prod.data(), conv.data());
  const double scale = 1.0 / (static_cast<double>(nn) * static_cast<double>(kernel.count));
  std::vector<double> avg(nn);
  for (std::size_t i = 0; i < nn; ++i)
    avg[i] = std::clamp(mean + conv[i].real() * scale, lo, hi);
  return avg;
}

}  // namespace detail

/// Average of the field over the discrete periodic ball B(x, r) at every node.
inline DiskAverageField disk_average(const ScalarField& f, double r) {
  if (r < 1.0 / f.n - 1e-12 || r > 0.5 + 1e-12)
    throw std::invalid_argument("disk_average: radius must lie in [1/n, 1/2]");
  const std::size_t nn = f.samples.size();
  std::vector<std::complex<double>> centered(nn), fhat(nn);
  for (std::size_t i = 0; i < nn; ++i) centered[i] = f.samples[i] - f.mean;
  detail::fft_for(f.n).forward(centered.data(), fhat.data());
  const auto kernel = detail::disk_kernel_fft(f.n, r);
  const double lo = *std::min_element(f.samples.begin(), f.samples.end());
  const double hi = *std::max_element(f.samples.begin(), f.samples.end());
  DiskAverageField out;
  out.radius = r;
  out.n = f.n;
  out.averages = detail::disk_average_from_spectrum(f.n, fhat, f.mean, lo, hi, kernel);
  return out;
}

/// Geometric mixing scale: the smallest radius in params.radii such that
/// max_x |avg_{B(x,r)} f| <= kappa' * ||f||_inf; sentinel 1/2 when none does.
inline MixScale mix_g(const ScalarField& f, const MixParams& params) {
  if (params.radii.empty()) throw std::invalid_argument("mix_g: empty radii set");
  if (params.kappa_prime <= 0.0 || params.kappa_prime >= 1.0)
    throw std::invalid_argument("mix_g: kappa' must lie in (0,1)");
  const double linf = max_abs(f);
  MixScale result;
  result.bracket = 1.0 / f.n;
  if (linf == 0.0) return result;  // the zero field is mixed at every scale
  if (!has_zero_mean(f)) throw std::invalid_argument("mix_g: field must have zero mean");

  const std::size_t nn = f.samples.size();
  std::vector<std::complex<double>> centered(nn), fhat(nn);
  for (std::size_t i = 0; i < nn; ++i) centered[i] = f.samples[i] - f.mean;
  detail::fft_for(f.n).forward(centered.data(), fhat.data());
  const double lo = -linf, hi = linf;
  const double threshold = params.kappa_prime * linf + 1e-12 * linf;

  for (double r : params.radii) {
    const auto kernel = detail::disk_kernel_fft(f.n, r);
    const auto avg =
        detail::disk_average_from_spectrum(f.n, fhat, f.mean, lo, hi, kernel);
    double worst = 0.0;
    for (double a : avg) worst = std::max(worst, std::abs(a));
    if (worst <= threshold) {
      result.epsilon = r;
      return result;
    }
  }
  result.epsilon = 0.5;
  result.saturated = true;
  return result;
}

/// Functional mixing scale: the homogeneous Sobolev norm of order -1.
inline double mix_f(const ScalarField& f) { return sobolev_norm(f, -1.0); }

}  // namespace mixlab
