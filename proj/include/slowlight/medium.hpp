#ifndef SLOWLIGHT_MEDIUM_HPP
#define SLOWLIGHT_MEDIUM_HPP

// Propagation coefficients of two group-velocity-matched EIT pulses and the
// figure-of-merit formulas built on them.
//
// Unit convention: c = 1 and every rate is measured in units of a reference
// linewidth (normally gamma_ab = 1). Lengths are then in units of c/gamma_ab.

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slowlight {

inline constexpr double pi = std::numbers::pi;

/// Raw atomic, drive and geometry parameters. Both species share linewidths,
/// density and drive strength, which is what keeps the group velocities equal.
struct MediumParams {
  double gamma_ab = 1.0;        // optical transition linewidth
  double gamma_bc = 1e-4;       // ground-state (dark state) decoherence
  double gamma_cd = 1.0;        // linewidth of the Stark-shifting transition
  double delta = 20.0;          // single-photon detuning of E2
  double omega_drive = 2.0;     // drive Rabi frequency
  double n_atoms = 1600.0;      // atoms per species
  double sigma_over_area = 0.5; // resonant cross-section over beam area
  double length = 1.0;          // interaction region
  double c_light = 1.0;

  /// g^2 = gamma_ab sigma c / (2 A l).
  double coupling_sq() const { return gamma_ab * sigma_over_area * c_light / (2.0 * length); }

  /// sigma N / (2 A).
  double optical_depth() const { return sigma_over_area * n_atoms / 2.0; }
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void require(bool ok, const std::string& name, const std::string& constraint, double got) {
  if (!ok) {
    throw std::invalid_argument(name + " must be " + constraint + " (got " + detail::num(got) + ")");
  }
}

} // namespace detail

/// Throws std::invalid_argument naming the first field that breaks its
/// constraint.
inline void validate(const MediumParams& p) {
  using detail::require;
  require(std::isfinite(p.gamma_ab) && p.gamma_ab > 0, "gamma_ab", "> 0", p.gamma_ab);
  require(std::isfinite(p.gamma_bc) && p.gamma_bc > 0, "gamma_bc", "> 0", p.gamma_bc);
  require(std::isfinite(p.gamma_cd) && p.gamma_cd > 0, "gamma_cd", "> 0", p.gamma_cd);
  require(std::isfinite(p.delta) && p.delta != 0, "delta", "nonzero", p.delta);
  require(std::isfinite(p.omega_drive) && p.omega_drive > 0, "omega_drive", "> 0", p.omega_drive);
  require(std::isfinite(p.n_atoms) && p.n_atoms > 0, "n_atoms", "> 0", p.n_atoms);
  require(std::isfinite(p.sigma_over_area) && p.sigma_over_area > 0, "sigma_over_area", "> 0",
          p.sigma_over_area);
  require(std::isfinite(p.length) && p.length > 0, "length", "> 0", p.length);
  require(std::isfinite(p.c_light) && p.c_light > 0, "c_light", "> 0", p.c_light);
}

/// Chooses n_atoms so that g^2 N / Omega^2 equals the requested group index.
inline MediumParams with_group_index(MediumParams p, double n_group) {
  detail::require(std::isfinite(n_group) && n_group > 0, "n_group", "> 0", n_group);
  p.n_atoms = n_group * p.omega_drive * p.omega_drive / p.coupling_sq();
  return p;
}

struct DerivedCoefficients {
  double g_coupling = 0;      // sqrt(gamma_ab sigma c / (2 A l))
  double n_group = 0;         // g^2 N / Omega^2
  double v_group = 0;         // c / (1 + n_g)
  double kappa = 0;           // n_g gamma_bc / c
  double beta = 0;            // n_g gamma_ab / (Omega^2 c)
  std::complex<double> eta;   // [n_g g^2 / (i gamma_cd + Delta)] l / (2 pi c^2)
  double tau_g = 0;           // group delay n_g l / c
  double optical_depth = 0;   // sigma N / (2 A)
  double delta_omega_max = 0; // (beta l)^(-1/2)
  double length = 0;
  double c_light = 1.0;
  double spread_rate = 0;     // Omega^2 / gamma_ab, so tau_s = spread_rate * T^2

  double group_delay_at(double z) const { return n_group * z / c_light; }

  /// Transparency bandwidth after propagating a distance z.
  double delta_omega_max_at(double z) const { return 1.0 / std::sqrt(beta * z); }

  /// Time after which a pulse of duration T spreads appreciably.
  double tau_spread(double duration) const { return spread_rate * duration * duration; }
};

inline DerivedCoefficients derive_coefficients(const MediumParams& p) {
  validate(p);
  DerivedCoefficients d;
  const double omega_sq = p.omega_drive * p.omega_drive;
  const double g_sq = p.coupling_sq();
  d.g_coupling = std::sqrt(g_sq);
  d.n_group = g_sq * p.n_atoms / omega_sq;
  d.v_group = p.c_light / (1.0 + d.n_group);
  d.kappa = d.n_group * p.gamma_bc / p.c_light;
  d.beta = d.n_group * p.gamma_ab / (omega_sq * p.c_light);
  d.eta = (d.n_group * g_sq / std::complex<double>(p.delta, p.gamma_cd)) * p.length /
          (2.0 * pi * p.c_light * p.c_light);
  d.length = p.length;
  d.c_light = p.c_light;
  d.tau_g = d.group_delay_at(p.length);
  d.optical_depth = p.optical_depth();
  d.delta_omega_max = d.delta_omega_max_at(p.length);
  d.spread_rate = omega_sq / p.gamma_ab;
  return d;
}

/// Peak cross-phase shift of a Gaussian pulse of energy E (in photons) and
/// duration T, from the group delay.
inline double classical_phase_shift(const MediumParams& p, double photon_energy_units, double duration) {
  validate(p);
  detail::require(duration > 0, "duration", "> 0", duration);
  detail::require(photon_energy_units >= 0, "photon_number", ">= 0", photon_energy_units);
  const double tau_g = derive_coefficients(p).tau_g;
  return std::sqrt(std::log(2.0) / (4.0 * pi)) * (p.gamma_cd / p.delta) * p.sigma_over_area *
         photon_energy_units * (tau_g / duration);
}

/// Conditional phase Phi acquired per photon pair for detection bandwidth
/// `bandwidth`.
inline double quantum_phase_shift(const MediumParams& p, double bandwidth) {
  validate(p);
  detail::require(bandwidth >= 0, "bandwidth", ">= 0", bandwidth);
  const double tau_g = derive_coefficients(p).tau_g;
  return p.sigma_over_area * (p.gamma_cd / p.delta) * bandwidth * tau_g / (4.0 * pi);
}

struct SpectrumPoint {
  double omega = 0;
  double amplitude = 0;    // exp[-(kappa + beta omega^2) z]
  double transmission = 0; // amplitude^2
  double phase = 0;        // excess phase over vacuum
};

/// Transfer function of the quadratically expanded medium response.
///
/// The phase is the group-delay phase omega tau_g(z) relative to vacuum. A
/// nonzero `probe_intensity` |E2|^2 adds the Stark term Re(eta)|E2|^2 z, which
/// is the same as moving the line centre to -Re(eta)|E2|^2 c / n_g.
inline std::vector<SpectrumPoint> transparency_spectrum(const DerivedCoefficients& coeffs, double z,
                                                        const std::vector<double>& omega_grid,
                                                        double probe_intensity = 0.0) {
  if (omega_grid.empty()) {
    throw std::invalid_argument("transparency_spectrum: empty frequency grid");
  }
  if (!(z > 0) || z > coeffs.length) {
    throw std::invalid_argument("transparency_spectrum: z must lie in (0, length]");
  }
  std::vector<SpectrumPoint> out;
  out.reserve(omega_grid.size());
  const double delay = coeffs.group_delay_at(z);
  const double stark = coeffs.eta.real() * probe_intensity * z;
  for (double w : omega_grid) {
    SpectrumPoint pt;
    pt.omega = w;
    pt.amplitude = std::exp(-(coeffs.kappa + coeffs.beta * w * w) * z);
    pt.transmission = std::exp(-2.0 * (coeffs.kappa + coeffs.beta * w * w) * z);
    pt.phase = w * delay + stark;
    out.push_back(pt);
  }
  return out;
}

struct RegimeReport {
  double saturation_ratio = 0;       // [Omega^2/(gamma_ab gamma_bc)] / (N sigma/A)
  double dark_state_product = 0;     // tau_g gamma_bc
  double bandwidth_ratio = 0;        // bandwidth / delta_omega_max(l)
  std::optional<double> pulse_ratio; // (1/T) / bandwidth

  bool saturated = false;     // saturation_ratio >= 1
  bool dark_state_ok = false; // tau_g < 1/gamma_bc
  bool bandwidth_ok = false;  // 0 < bandwidth < delta_omega_max(l)
  std::optional<bool> pulse_ok;
  std::vector<std::string> messages;

  bool all_ok() const { return saturated && dark_state_ok && bandwidth_ok && pulse_ok.value_or(true); }
};

/// Checks the inequalities under which the closed-form results apply. A
/// violated regime is reported, never thrown. When a pulse duration is given
/// its bandwidth 1/T must also fit below the detection bandwidth.
inline RegimeReport validate_regime(const MediumParams& p, double bandwidth,
                                    std::optional<double> pulse_duration = std::nullopt) {
  const DerivedCoefficients d = derive_coefficients(p);
  RegimeReport r;
  r.saturation_ratio = (p.omega_drive * p.omega_drive / (p.gamma_ab * p.gamma_bc)) /
                       (p.n_atoms * p.sigma_over_area);
  r.dark_state_product = d.tau_g * p.gamma_bc;
  r.bandwidth_ratio = bandwidth / d.delta_omega_max;
  r.saturated = r.saturation_ratio >= 1.0;
  r.dark_state_ok = r.dark_state_product < 1.0;
  r.bandwidth_ok = bandwidth > 0 && r.bandwidth_ratio < 1.0;

  if (!r.saturated) {
    r.messages.push_back("EIT not saturated: Omega^2/(gamma_ab gamma_bc) is below N sigma/A (ratio " +
                         detail::num(r.saturation_ratio) + ")");
  }
  if (!r.dark_state_ok) {
    r.messages.push_back("group delay exceeds dark-state lifetime: tau_g gamma_bc = " +
                         detail::num(r.dark_state_product));
  }
  if (!r.bandwidth_ok) {
    r.messages.push_back("bandwidth " + detail::num(bandwidth) + " not inside (0, delta_omega_max = " +
                         detail::num(d.delta_omega_max) + ")");
  }
  if (pulse_duration) {
    const double pulse_bw = 1.0 / *pulse_duration;
    r.pulse_ratio = pulse_bw / bandwidth;
    r.pulse_ok = *pulse_duration > 0 && pulse_bw < bandwidth;
    if (!*r.pulse_ok) {
      r.messages.push_back("pulse bandwidth 1/T = " + detail::num(pulse_bw) +
                           " not below detection bandwidth " + detail::num(bandwidth));
    }
  }
  return r;
}

/// Named parameter set together with the scenario defaults it implies.
struct Preset {
  std::string name;
  std::string note;
  MediumParams medium;
  double bandwidth = 0;
  double pulse_duration = 0;
};

/// Illustrative numbers for a natural rubidium mixture. Not fitted to any
/// measurement; chosen so that the optical depth is 900.
inline Preset rubidium_mixture() {
  Preset p;
  p.name = "rubidium-mixture";
  p.note = "illustrative, non-authoritative values (optical depth 900)";
  p.medium.gamma_ab = 1.0;
  p.medium.gamma_bc = 1e-4;
  p.medium.gamma_cd = 1.0;
  p.medium.delta = 20.0;
  p.medium.omega_drive = 2.0;
  p.medium.n_atoms = 3600.0;
  p.medium.sigma_over_area = 0.5;
  p.medium.length = 1.0;
  p.bandwidth = 0.1;
  p.pulse_duration = 15.0;
  return p;
}

inline std::optional<Preset> find_preset(const std::string& name) {
  if (name == "rubidium-mixture") {
    return rubidium_mixture();
  }
  return std::nullopt;
}

} // namespace slowlight

#endif
