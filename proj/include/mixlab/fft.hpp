#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace mixlab::detail {

// Complex 2-D FFT at a fixed resolution. Plans use FFTW_ESTIMATE|FFTW_UNALIGNED
// so execution is deterministic and works on arbitrary caller buffers.
// Planning is not thread-safe; the library assumes single-threaded use.
class Fft2d {
 public:
  explicit Fft2d(int n) : n_(n) {
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n) * n);
    std::vector<std::complex<double>> b(a.size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()),
                            FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                            reinterpret_cast<fftw_complex*>(b.data()),
                            FFTW_BACKWARD, flags);
    if (fwd_ == nullptr || bwd_ == nullptr)
      throw std::runtime_error("fftw plan creation failed");
  }
  ~Fft2d() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n() const { return n_; }

  /// out[k] = sum_x in[x] e^{-2pi i k.x/n}  (unnormalized)
  void forward(const std::complex<double>* in, std::complex<double>* out) const {
    // out-of-place c2c transforms do not modify the input array
    fftw_execute_dft(fwd_,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  /// out[x] = sum_k in[k] e^{+2pi i k.x/n}  (unnormalized)
  void backward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(bwd_,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

inline const Fft2d& fft_for(int n) {
  static std::map<int, std::unique_ptr<Fft2d>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft2d>(n);
  return *slot;
}

}  // namespace mixlab::detail
