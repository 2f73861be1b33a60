#ifndef SLOWLIGHT_ENVELOPE_HPP
#define SLOWLIGHT_ENVELOPE_HPP

// Mean-field pulse envelopes on a uniform retarded-time grid.
//
// Normalization follows the field quantization [E, E^+] = bandwidth: the
// photon number carried by an envelope alpha(t) is (1/2pi) * integral |alpha|^2 dt.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slowlight/fft.hpp"
#include "slowlight/medium.hpp"
#include "slowlight/table.hpp"

namespace slowlight {

using cplx = std::complex<double>;

/// Uniform periodic grid t_i = t_min + i dt, i < n, with dt = (t_max - t_min)/n.
class TimeGrid {
 public:
  TimeGrid(std::size_t n_points, double t_min, double t_max) : n_(n_points), t_min_(t_min), t_max_(t_max) {
    if (n_points < 8 || !std::has_single_bit(n_points)) {
      throw std::invalid_argument("TimeGrid: n_points must be a power of two >= 8 (got " +
                                  std::to_string(n_points) + ")");
    }
    if (!(t_max > t_min) || !std::isfinite(t_min) || !std::isfinite(t_max)) {
      throw std::invalid_argument("TimeGrid: need finite t_min < t_max");
    }
  }

  std::size_t size() const { return n_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  double dt() const { return (t_max_ - t_min_) / static_cast<double>(n_); }
  double time(std::size_t i) const { return t_min_ + static_cast<double>(i) * dt(); }

  std::vector<double> times() const {
    std::vector<double> t(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      t[i] = time(i);
    }
    return t;
  }

  /// Angular frequencies in FFT order, spanning [-pi/dt, pi/dt).
  std::vector<double> angular_frequencies() const {
    std::vector<double> w(n_);
    const double dw = 2.0 * pi / (static_cast<double>(n_) * dt());
    const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
    for (std::size_t k = 0; k < n_; ++k) {
      auto kk = static_cast<std::ptrdiff_t>(k);
      if (kk >= half) {
        kk -= static_cast<std::ptrdiff_t>(n_);
      }
      w[k] = dw * static_cast<double>(kk);
    }
    return w;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  std::size_t n_;
  double t_min_;
  double t_max_;
};

struct Envelope {
  TimeGrid grid;
  std::vector<cplx> samples;
  double bandwidth = 1.0;

  Envelope(TimeGrid g, std::vector<cplx> s, double bw) : grid(g), samples(std::move(s)), bandwidth(bw) {
    if (samples.size() != grid.size()) {
      throw std::invalid_argument("Envelope: sample count does not match grid");
    }
  }
};

namespace detail {

inline double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

} // namespace detail

/// (1/2pi) * integral |alpha|^2 dt by the trapezoid rule.
inline double photon_number(const Envelope& env) {
  const std::size_t n = env.samples.size();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += detail::trapezoid_weight(i, n) * std::norm(env.samples[i]);
  }
  return s * env.grid.dt() / (2.0 * pi);
}

/// Fraction of spectral power outside +-bandwidth/2. The quantum description
/// assumes this is small; callers warn rather than reject.
inline double out_of_band_fraction(const Envelope& env) {
  Fft fft(env.grid.size());
  auto spec = fft.forward_copy(env.samples);
  const auto w = env.grid.angular_frequencies();
  double total = 0, outside = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double p = std::norm(spec[k]);
    total += p;
    if (std::abs(w[k]) > env.bandwidth / 2.0) {
      outside += p;
    }
  }
  return total > 0 ? outside / total : 0.0;
}

/// Peak intensity |alpha|^2 of a Gaussian pulse carrying `photon_number`
/// photons with intensity FWHM `duration_fwhm`.
inline double gaussian_peak_intensity(double photon_number, double duration_fwhm) {
  return 2.0 * pi * photon_number * 2.0 * std::sqrt(std::log(2.0) / pi) / duration_fwhm;
}

/// Gaussian envelope with |alpha|^2 = P exp(-4 ln2 (t - center)^2 / T^2).
inline Envelope make_gaussian_pulse(const TimeGrid& grid, double photon_number, double duration_fwhm,
                                    double center, double bandwidth) {
  detail::require(std::isfinite(photon_number) && photon_number >= 0, "photon_number", ">= 0", photon_number);
  detail::require(std::isfinite(duration_fwhm) && duration_fwhm > 0, "duration", "> 0", duration_fwhm);
  detail::require(std::isfinite(bandwidth) && bandwidth > 0, "bandwidth", "> 0", bandwidth);
  if (!(grid.dt() < duration_fwhm / 8.0)) {
    throw std::invalid_argument("make_gaussian_pulse: duration " + detail::num(duration_fwhm) +
                                " not resolved by dt = " + detail::num(grid.dt()) + " (need dt < T/8)");
  }
  // Intensity is exp(-(t-c)^2 / s^2); the mass beyond distance a is erfc(a/s)/2.
  const double s = duration_fwhm / (2.0 * std::sqrt(std::log(2.0)));
  const double lo = (center - grid.t_min()) / s;
  const double hi = (grid.t_max() - center) / s;
  const double clipped = 0.5 * std::erfc(lo) + 0.5 * std::erfc(hi);
  if (lo <= 0 || hi <= 0 || clipped > 1e-8) {
    throw std::invalid_argument("make_gaussian_pulse: pulse clipped by the time window (tail mass " +
                                detail::num(clipped) + ")");
  }
  const double amp = std::sqrt(gaussian_peak_intensity(photon_number, duration_fwhm));
  const double a = 2.0 * std::log(2.0) / (duration_fwhm * duration_fwhm);
  std::vector<cplx> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i) - center;
    samples[i] = amp * std::exp(-a * t * t);
  }
  return Envelope(grid, std::move(samples), bandwidth);
}

struct PulseMetrics {
  double photon_number = 0;
  std::optional<double> peak_phase; // arg alpha at max |alpha|
  std::optional<double> rms_duration;
  std::optional<double> centroid;
  std::optional<double> peak_intensity;
};

inline PulseMetrics pulse_metrics(const Envelope& env) {
  PulseMetrics m;
  m.photon_number = photon_number(env);
  const std::size_t n = env.samples.size();
  double w0 = 0, w1 = 0, peak = 0;
  std::size_t peak_idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = detail::trapezoid_weight(i, n) * std::norm(env.samples[i]);
    w0 += p;
    w1 += p * env.grid.time(i);
    if (std::norm(env.samples[i]) > peak) {
      peak = std::norm(env.samples[i]);
      peak_idx = i;
    }
  }
  if (!(w0 > 0)) {
    return m;
  }
  const double mean = w1 / w0;
  double w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = env.grid.time(i) - mean;
    w2 += detail::trapezoid_weight(i, n) * std::norm(env.samples[i]) * d * d;
  }
  m.centroid = mean;
  m.rms_duration = std::sqrt(w2 / w0);
  m.peak_phase = std::arg(env.samples[peak_idx]);
  m.peak_intensity = peak;
  return m;
}

// --- serialization -------------------------------------------------------

inline Table envelope_table(const Envelope& env) {
  Table t({{"t", "time"}, {"alpha", "field", true}});
  t.set_meta("kind", "envelope");
  t.set_meta("n_points", static_cast<double>(env.grid.size()));
  t.set_meta("t_min", env.grid.t_min());
  t.set_meta("t_max", env.grid.t_max());
  t.set_meta("bandwidth", env.bandwidth);
  for (std::size_t i = 0; i < env.grid.size(); ++i) {
    t.add_row({env.grid.time(i), env.samples[i]});
  }
  return t;
}

inline void write_envelope_text(const Envelope& env, const std::filesystem::path& path) {
  emit_table(envelope_table(env), path);
}

inline Envelope envelope_from_table(const ParsedTable& t) {
  auto need = [&](const char* key) {
    const std::string* v = t.meta(key);
    if (!v) {
      throw std::runtime_error(std::string("envelope table lacks '") + key + "'");
    }
    return parse_number(*v);
  };
  const TimeGrid grid(static_cast<std::size_t>(need("n_points")), need("t_min"), need("t_max"));
  if (t.rows.size() != grid.size()) {
    throw std::runtime_error("envelope table has " + std::to_string(t.rows.size()) + " rows, expected " +
                             std::to_string(grid.size()));
  }
  const std::size_t re = t.column_index("alpha_re");
  const std::size_t im = t.column_index("alpha_im");
  std::vector<cplx> samples;
  samples.reserve(grid.size());
  for (const auto& row : t.rows) {
    samples.emplace_back(row.at(re), row.at(im));
  }
  return Envelope(grid, std::move(samples), need("bandwidth"));
}

inline Envelope read_envelope_text(const std::filesystem::path& path) {
  return envelope_from_table(parse_table(path));
}

// Binary layout, little-endian:
//   header (16 bytes): char magic[4] = "SLE1", uint32 n_points, float64 dt
//   body: float64 t_min, float64 t_max, float64 bandwidth,
//         n_points x (float64 re, float64 im)
inline constexpr char envelope_magic[4] = {'S', 'L', 'E', '1'};

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary envelope I/O assumes little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) {
    throw std::runtime_error("truncated envelope file");
  }
  return v;
}

} // namespace detail

inline void write_envelope_binary(const Envelope& env, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  os.write(envelope_magic, 4);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(env.grid.size()));
  detail::put<double>(os, env.grid.dt());
  detail::put<double>(os, env.grid.t_min());
  detail::put<double>(os, env.grid.t_max());
  detail::put<double>(os, env.bandwidth);
  for (const auto& s : env.samples) {
    detail::put<double>(os, s.real());
    detail::put<double>(os, s.imag());
  }
  if (!os) {
    throw std::runtime_error("write to '" + path.string() + "' failed");
  }
}

inline Envelope read_envelope_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("cannot open '" + path.string() + "'");
  }
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, envelope_magic, 4) != 0) {
    throw std::runtime_error("'" + path.string() + "' is not a binary envelope file");
  }
  const auto n = detail::get<std::uint32_t>(is);
  const auto dt = detail::get<double>(is);
  const auto t_min = detail::get<double>(is);
  const auto t_max = detail::get<double>(is);
  const auto bandwidth = detail::get<double>(is);
  const TimeGrid grid(n, t_min, t_max);
  if (std::abs(grid.dt() - dt) > 1e-12 * std::abs(dt)) {
    throw std::runtime_error("binary envelope header dt disagrees with the stored window");
  }
  std::vector<cplx> samples(n);
  for (auto& s : samples) {
    const double re = detail::get<double>(is);
    const double im = detail::get<double>(is);
    s = {re, im};
  }
  return Envelope(grid, std::move(samples), bandwidth);
}

} // namespace slowlight

#endif
