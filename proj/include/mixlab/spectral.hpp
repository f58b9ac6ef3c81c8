#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mixlab/fft.hpp"
#include "mixlab/scalar_field.hpp"

namespace mixlab {

/// Fourier coefficients of a field, convention
///   fhat(k) = (1/n^2) sum_{i,j} f(i/n, j/n) e^{-2pi i k.(i/n, j/n)},
/// stored in FFT layout: array index a in [0,n) carries wave number a for
/// a <= n/2-1 and a-n otherwise. fhat(0) is literally the field mean.
struct SpectralField {
  int n = 0;
  std::vector<std::complex<double>> coeff;

  static int wrap_index(int n, int k) { return k >= 0 ? k : k + n; }
  int wave(int idx) const { return idx <= n / 2 - 1 ? idx : idx - n; }

  std::complex<double> at(int k1, int k2) const {
    return coeff[static_cast<std::size_t>(wrap_index(n, k1)) * n + wrap_index(n, k2)];
  }
  std::complex<double>& at(int k1, int k2) {
    return coeff[static_cast<std::size_t>(wrap_index(n, k1)) * n + wrap_index(n, k2)];
  }
};

inline SpectralField spectral(const ScalarField& f) {
  SpectralField s;
  s.n = f.n;
  const std::size_t nn = f.samples.size();
  std::vector<std::complex<double>> in(nn);
  for (std::size_t i = 0; i < nn; ++i) in[i] = f.samples[i];
  s.coeff.resize(nn);
  detail::fft_for(f.n).forward(in.data(), s.coeff.data());
  const double inv = 1.0 / (static_cast<double>(f.n) * f.n);
  for (auto& c : s.coeff) c *= inv;
  return s;
}

inline ScalarField inverse(const SpectralField& s) {
  const std::size_t nn = s.coeff.size();
  std::vector<std::complex<double>> out(nn);
  detail::fft_for(s.n).backward(s.coeff.data(), out.data());
  std::vector<double> samples(nn);
  for (std::size_t i = 0; i < nn; ++i) samples[i] = out[i].real();
  return make_field(s.n, std::move(samples));
}

/// Homogeneous Sobolev norm (sum_{k != 0} |k|^{2s} |fhat(k)|^2)^{1/2} with |k|
/// the Euclidean norm of the integer wave vector (no 2pi factor).
inline double sobolev_norm(const SpectralField& sf, double s) {
  double acc = 0.0;
  for (int a1 = 0; a1 < sf.n; ++a1) {
    const int k1 = sf.wave(a1);
    for (int a2 = 0; a2 < sf.n; ++a2) {
      const int k2 = sf.wave(a2);
      if (k1 == 0 && k2 == 0) continue;
      const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      const double w = (s == 0.0) ? 1.0 : std::pow(k2sum, s);
      const std::complex<double> c = sf.coeff[static_cast<std::size_t>(a1) * sf.n + a2];
      acc += w * std::norm(c);
    }
  }
  return std::sqrt(acc);
}

inline double sobolev_norm(const ScalarField& f, double s) {
  if (s < 0.0 && !has_zero_mean(f))
    throw std::invalid_argument("sobolev_norm: negative order requires a zero-mean field");
  return sobolev_norm(spectral(f), s);
}

/// The unique zero-average potential with Laplacian(phi) = f, i.e.
/// phihat(k) = -fhat(k) / (4 pi^2 |k|^2) for k != 0. Under the integer-|k|
/// convention, ||grad phi||_{L2} = (1/2pi) * sobolev_norm(f, -1).
inline ScalarField poisson_potential(const ScalarField& f) {
  if (!has_zero_mean(f))
    throw std::invalid_argument("poisson_potential: field must have zero mean");
  SpectralField s = spectral(f);
  for (int a1 = 0; a1 < s.n; ++a1) {
    const int k1 = s.wave(a1);
    for (int a2 = 0; a2 < s.n; ++a2) {
      const int k2 = s.wave(a2);
      auto& c = s.coeff[static_cast<std::size_t>(a1) * s.n + a2];
      if (k1 == 0 && k2 == 0) {
        c = 0.0;
      } else {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
        c = -c / (4.0 * kPi * kPi * k2sum);
      }
    }
  }
  return inverse(s);
}

namespace detail {

// Spectral partial derivative (physical 2pi factors). The Nyquist row/column
// is zeroed: it has no conjugate partner under an odd multiplier.
inline SpectralField derivative(const SpectralField& s, int axis) {
  SpectralField d = s;
  for (int a1 = 0; a1 < s.n; ++a1) {
    const int k1 = s.wave(a1);
    for (int a2 = 0; a2 < s.n; ++a2) {
      const int k2 = s.wave(a2);
      auto& c = d.coeff[static_cast<std::size_t>(a1) * s.n + a2];
      if (k1 == -s.n / 2 || k2 == -s.n / 2) {
        c = 0.0;
        continue;
      }
      const double k = axis == 0 ? k1 : k2;
      c *= std::complex<double>(0.0, kTwoPi * k);
    }
  }
  return d;
}

}  // namespace detail

/// Pointwise |grad f| with true (2pi) derivative factors.
inline ScalarField gradient_magnitude(const ScalarField& f) {
  const SpectralField s = spectral(f);
  const ScalarField gx = inverse(detail::derivative(s, 0));
  const ScalarField gy = inverse(detail::derivative(s, 1));
  std::vector<double> v(f.samples.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::hypot(gx.samples[i], gy.samples[i]);
  return make_field(f.n, std::move(v));
}

/// L2 norm of the physical divergence of (u1, u2), evaluated spectrally.
inline double spectral_divergence_l2(const ScalarField& u1, const ScalarField& u2) {
  if (u1.n != u2.n) throw std::invalid_argument("divergence: component resolutions differ");
  const SpectralField s1 = detail::derivative(spectral(u1), 0);
  const SpectralField s2 = detail::derivative(spectral(u2), 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < s1.coeff.size(); ++i)
    acc += std::norm(s1.coeff[i] + s2.coeff[i]);
  return std::sqrt(acc);
}

/// Spectral energy binned by shells floor(|k|) = 0, 1, 2, ...
inline std::vector<double> spectral_shell_energy(const SpectralField& s) {
  std::vector<double> shells(static_cast<std::size_t>(s.n / 2) + 2, 0.0);
  for (int a1 = 0; a1 < s.n; ++a1) {
    const int k1 = s.wave(a1);
    for (int a2 = 0; a2 < s.n; ++a2) {
      const int k2 = s.wave(a2);
      const double kk = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
      std::size_t bin = std::min<std::size_t>(static_cast<std::size_t>(kk), shells.size() - 1);
      shells[bin] += std::norm(s.coeff[static_cast<std::size_t>(a1) * s.n + a2]);
    }
  }
  return shells;
}

}  // namespace mixlab
