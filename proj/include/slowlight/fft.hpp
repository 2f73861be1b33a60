#ifndef SLOWLIGHT_FFT_HPP
#define SLOWLIGHT_FFT_HPP

// Thin RAII wrapper over FFTW's complex 1-D transforms.

#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace slowlight {

namespace detail {

// Plan creation and destruction in FFTW are not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace detail

/// Unnormalized forward transform X_k = sum_j x_j exp(-2 pi i jk/n) and its
/// inverse, normalized by 1/n so that inverse(forward(x)) == x.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0) {
      throw std::invalid_argument("Fft: zero length");
    }
    std::lock_guard lock(detail::fftw_planner_mutex());
    buf_ = fftw_alloc_complex(n_);
    if (!buf_) {
      throw std::bad_alloc();
    }
    const int len = static_cast<int>(n_);
    fwd_ = fftw_plan_dft_1d(len, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(len, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  ~Fft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  std::size_t size() const { return n_; }

  void forward(std::span<std::complex<double>> data) { run(fwd_, data, 1.0); }
  void inverse(std::span<std::complex<double>> data) { run(bwd_, data, 1.0 / static_cast<double>(n_)); }

  std::vector<std::complex<double>> forward_copy(std::span<const std::complex<double>> data) {
    std::vector<std::complex<double>> out(data.begin(), data.end());
    forward(out);
    return out;
  }

 private:
  void run(fftw_plan plan, std::span<std::complex<double>> data, double scale) {
    if (data.size() != n_) {
      throw std::invalid_argument("Fft: length mismatch");
    }
    std::memcpy(buf_, data.data(), n_ * sizeof(fftw_complex));
    fftw_execute(plan);
    const auto* src = reinterpret_cast<const std::complex<double>*>(buf_);
    for (std::size_t i = 0; i < n_; ++i) {
      data[i] = src[i] * scale;
    }
  }

  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

} // namespace slowlight

#endif
