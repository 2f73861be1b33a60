#ifndef SLOWLIGHT_QUANTUM_HPP
#define SLOWLIGHT_QUANTUM_HPP

// Closed-form quantum results for the lossless interaction: coherent-state
// collapse and revival, and the two-photon correlation amplitude.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "slowlight/envelope.hpp"
#include "slowlight/medium.hpp"

namespace slowlight {

namespace detail {

/// Phase reduced to [-pi, pi] so that multiples of 2 pi land on zero.
inline double reduce_phase(double phi) { return std::remainder(phi, 2.0 * pi); }

} // namespace detail

/// -2 sin^2(Phi/2) + i sin(Phi), which equals exp(i Phi) - 1.
inline cplx kerr_exponent(double phi) {
  const double r = detail::reduce_phase(phi);
  const double s = std::sin(r / 2.0);
  return {-2.0 * s * s, std::sin(r)};
}

/// Multi-mode coherent input alpha_i(t) at z = 0 with detection bandwidth.
struct CoherentInput {
  std::function<cplx(double)> alpha_fn;
  double bandwidth = 1.0;

  /// |alpha(t)|^2 / bandwidth, the exponent scale of the collapse.
  double mean_photons(double t) const { return std::norm(alpha_fn(t)) / bandwidth; }
};

/// <E_self> = alpha_self exp[(exp(i Phi) - 1) nbar_other].
inline cplx coherent_mean_field(double nbar_other, cplx alpha_self, double phi) {
  return alpha_self * std::exp(kerr_exponent(phi) * nbar_other);
}

/// Same, with nbar taken from the other field's profile at retarded time t.
inline cplx coherent_mean_field(const CoherentInput& other, cplx alpha_self, double phi, double t) {
  return coherent_mean_field(other.mean_photons(t), alpha_self, phi);
}

struct RevivalPoint {
  double phi = 0;
  double modulus = 0; // |<E>| / |alpha|
  double arg = 0;     // unwrapped phase sin(Phi) nbar
};

inline std::vector<RevivalPoint> collapse_revival_scan(double nbar, const std::vector<double>& phi_grid) {
  std::vector<RevivalPoint> out;
  out.reserve(phi_grid.size());
  for (double phi : phi_grid) {
    if (!std::isfinite(phi)) {
      throw std::invalid_argument("collapse_revival_scan: non-finite phase");
    }
    const cplx e = kerr_exponent(phi) * nbar;
    out.push_back({phi, std::exp(e.real()), e.imag()});
  }
  return out;
}

/// Single-photon wavefunction Psi(0, t), normalized so that
/// (1/2pi) * integral |Psi|^2 dt = 1.
struct SinglePhotonPacket {
  std::function<cplx(double)> psi_fn;
};

inline SinglePhotonPacket gaussian_single_photon(double duration_fwhm, double center = 0.0) {
  detail::require(duration_fwhm > 0, "duration", "> 0", duration_fwhm);
  const double amp = std::sqrt(gaussian_peak_intensity(1.0, duration_fwhm));
  const double a = 2.0 * std::log(2.0) / (duration_fwhm * duration_fwhm);
  return {[=](double t) { return cplx(amp * std::exp(-a * (t - center) * (t - center)), 0.0); }};
}

/// (1/2pi) * integral |Psi|^2 dt over [t_min, t_max] by the trapezoid rule.
inline double packet_norm(const SinglePhotonPacket& p, double t_min, double t_max, std::size_t n = 4097) {
  const double h = (t_max - t_min) / static_cast<double>(n - 1);
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * std::norm(p.psi_fn(t_min + static_cast<double>(i) * h));
  }
  return s * h / (2.0 * pi);
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

/// Interaction factor 1 + sinc(bandwidth (t1 - t2) / 2) (exp(i Phi) - 1).
inline cplx pair_factor(double phi, double bandwidth, double dt) {
  return 1.0 + sinc(bandwidth * dt / 2.0) * kerr_exponent(phi);
}

/// Two-photon amplitude on a t1'' x t2'' grid, where t'' already has the
/// medium and vacuum delays removed. values[i * times2.size() + j] holds
/// (times1[i], times2[j]).
struct CorrelationGrid {
  std::vector<double> times1;
  std::vector<double> times2;
  std::vector<cplx> values;
  double phi = 0;
  double bandwidth = 0;

  cplx at(std::size_t i, std::size_t j) const { return values[i * times2.size() + j]; }

  /// (1/2pi)^2 * double integral of |Psi12|^2 by the trapezoid rule. Reported
  /// as a diagnostic; it need not equal 1.
  double norm_integral() const {
    auto weights = [](const std::vector<double>& t) {
      std::vector<double> w(t.size(), 0.0);
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const double h = t[i + 1] - t[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
      }
      return w;
    };
    const auto w1 = weights(times1);
    const auto w2 = weights(times2);
    double s = 0;
    for (std::size_t i = 0; i < times1.size(); ++i) {
      for (std::size_t j = 0; j < times2.size(); ++j) {
        s += w1[i] * w2[j] * std::norm(at(i, j));
      }
    }
    return s / (4.0 * pi * pi);
  }
};

/// Exact time shift from lab coordinates (t, z) behind the cell to t''.
inline double retarded_exit_time(double t, double z, const DerivedCoefficients& c) {
  return t - c.length / c.v_group - (z - c.length) / c.c_light;
}

inline CorrelationGrid photon_pair_correlation(const SinglePhotonPacket& p1, const SinglePhotonPacket& p2, double phi,
                                               double bandwidth, const std::vector<double>& times1,
                                               const std::vector<double>& times2) {
  CorrelationGrid g;
  g.times1 = times1;
  g.times2 = times2;
  g.phi = phi;
  g.bandwidth = bandwidth;
  g.values.resize(times1.size() * times2.size());
  std::vector<cplx> psi2(times2.size());
  for (std::size_t j = 0; j < times2.size(); ++j) {
    psi2[j] = p2.psi_fn(times2[j]);
  }
  for (std::size_t i = 0; i < times1.size(); ++i) {
    const cplx psi1 = p1.psi_fn(times1[i]);
    for (std::size_t j = 0; j < times2.size(); ++j) {
      g.values[i * times2.size() + j] = psi1 * psi2[j] * pair_factor(phi, bandwidth, times1[i] - times2[j]);
    }
  }
  return g;
}

} // namespace slowlight

#endif
