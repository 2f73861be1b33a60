#ifndef SLOWLIGHT_PROPAGATION_HPP
#define SLOWLIGHT_PROPAGATION_HPP

// Mean-field propagation of the two matched-velocity pulses.
//
// In the shared retarded frame tau = t - z/v_g both envelopes obey
//
//   dE_i/dz = -kappa E_i + beta d^2E_i/dtau^2 + i eta |E_j|^2 E_i,
//
// which is integrated by Strang splitting: the linear part is exact in the
// spectral basis (multiplier exp[(-kappa - beta w^2) dz]) and the cross-phase
// part is exact pointwise for frozen intensities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slowlight/envelope.hpp"
#include "slowlight/fft.hpp"
#include "slowlight/medium.hpp"

namespace slowlight {

struct PropagationOptions {
  /// Apply |Im eta| |E_j|^2 as an extra intensity-dependent loss during the
  /// nonlinear sub-step.
  bool imag_eta_loss = false;
  /// Largest cross-phase allowed in a single step before the run is refused.
  double max_step_phase = 0.5;
};

struct PropagationResult {
  Envelope env1_out;
  Envelope env2_out;
  double z = 0;
  std::size_t steps = 0;
  double energy_in1 = 0, energy_in2 = 0;
  double energy_out1 = 0, energy_out2 = 0;
  double max_step_phase = 0;
  bool edge_warning = false; // output tails reach the window edge
};

namespace detail {

inline void check_pair(const Envelope& a, const Envelope& b) {
  if (!(a.grid == b.grid)) {
    throw std::invalid_argument("envelopes are on different time grids");
  }
}

inline void check_finite(const Envelope& e, const char* name) {
  for (const auto& s : e.samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw std::invalid_argument(std::string(name) + " has non-finite samples");
    }
  }
}

inline double max_intensity(const Envelope& e) {
  double m = 0;
  for (const auto& s : e.samples) {
    m = std::max(m, std::norm(s));
  }
  return m;
}

/// True when the first or last sample carries more than `tol` of the peak
/// intensity, i.e. the periodic window is about to wrap the pulse around.
inline bool touches_edges(const Envelope& e, double tol = 1e-8) {
  const double peak = max_intensity(e);
  if (peak == 0) {
    return false;
  }
  return std::norm(e.samples.front()) > tol * peak || std::norm(e.samples.back()) > tol * peak;
}

} // namespace detail

/// Closed-form lossless cross-phase modulation: each envelope picks up the
/// phase eta |E_other|^2 z, evaluated with the other field's input intensity.
inline std::pair<Envelope, Envelope> analytic_xpm(const Envelope& env1, const Envelope& env2, double eta_real,
                                                  double z) {
  detail::check_pair(env1, env2);
  Envelope out1 = env1;
  Envelope out2 = env2;
  for (std::size_t i = 0; i < env1.samples.size(); ++i) {
    out1.samples[i] = env1.samples[i] * std::polar(1.0, eta_real * std::norm(env2.samples[i]) * z);
    out2.samples[i] = env2.samples[i] * std::polar(1.0, eta_real * std::norm(env1.samples[i]) * z);
  }
  return {std::move(out1), std::move(out2)};
}

/// Symmetric split-step integration of both envelopes over a distance z.
inline PropagationResult propagate_pair(const Envelope& env1, const Envelope& env2, const DerivedCoefficients& coeffs,
                                        double z, std::size_t n_steps, const PropagationOptions& opts = {}) {
  detail::check_pair(env1, env2);
  detail::check_finite(env1, "env1");
  detail::check_finite(env2, "env2");
  if (n_steps < 1) {
    throw std::invalid_argument("propagate_pair: n_steps must be >= 1");
  }
  if (!(z >= 0) || !std::isfinite(z)) {
    throw std::invalid_argument("propagate_pair: z must be finite and >= 0");
  }
  if (detail::touches_edges(env1) || detail::touches_edges(env2)) {
    throw std::invalid_argument("propagate_pair: input pulse reaches the window edge; widen the grid");
  }

  const double dz = z / static_cast<double>(n_steps);
  const double eta_re = coeffs.eta.real();
  const double eta_loss = opts.imag_eta_loss ? std::abs(coeffs.eta.imag()) : 0.0;
  const double step_phase =
      std::abs(eta_re) * std::max(detail::max_intensity(env1), detail::max_intensity(env2)) * dz;
  if (step_phase > opts.max_step_phase) {
    throw std::invalid_argument("propagate_pair: per-step nonlinear phase " + detail::num(step_phase) +
                                " rad exceeds " + detail::num(opts.max_step_phase) + "; use at least " +
                                std::to_string(static_cast<std::size_t>(
                                    std::ceil(static_cast<double>(n_steps) * step_phase / opts.max_step_phase))) +
                                " steps");
  }

  const std::size_t n = env1.grid.size();
  const auto omega = env1.grid.angular_frequencies();
  std::vector<double> half(n), full(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rate = -coeffs.kappa - coeffs.beta * omega[k] * omega[k];
    half[k] = std::exp(rate * dz / 2.0);
    full[k] = std::exp(rate * dz);
  }

  Fft fft(n);
  std::vector<cplx> a = env1.samples;
  std::vector<cplx> b = env2.samples;

  auto linear = [&](const std::vector<double>& mult) {
    for (auto* field : {&a, &b}) {
      fft.forward(*field);
      for (std::size_t k = 0; k < n; ++k) {
        (*field)[k] *= mult[k];
      }
      fft.inverse(*field);
    }
  };
  auto nonlinear = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const double ia = std::norm(a[i]);
      const double ib = std::norm(b[i]);
      a[i] *= std::polar(std::exp(-eta_loss * ib * dz), eta_re * ib * dz);
      b[i] *= std::polar(std::exp(-eta_loss * ia * dz), eta_re * ia * dz);
    }
  };

  // L/2 N (L N)^(n-1) L/2: adjacent half steps merged.
  linear(half);
  for (std::size_t s = 0; s + 1 < n_steps; ++s) {
    nonlinear();
    linear(full);
  }
  nonlinear();
  linear(half);

  PropagationResult r{Envelope(env1.grid, std::move(a), env1.bandwidth),
                      Envelope(env2.grid, std::move(b), env2.bandwidth)};
  r.z = z;
  r.steps = n_steps;
  r.energy_in1 = photon_number(env1);
  r.energy_in2 = photon_number(env2);
  r.energy_out1 = photon_number(r.env1_out);
  r.energy_out2 = photon_number(r.env2_out);
  r.max_step_phase = step_phase;
  r.edge_warning = detail::touches_edges(r.env1_out) || detail::touches_edges(r.env2_out);
  return r;
}

} // namespace slowlight

#endif
