#ifndef SLOWLIGHT_RUN_HPP
#define SLOWLIGHT_RUN_HPP

// Scenario execution: dispatches a validated Scenario to the physics modules
// and renders plot-ready tables with a self-describing header.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "slowlight/envelope.hpp"
#include "slowlight/fock.hpp"
#include "slowlight/medium.hpp"
#include "slowlight/propagation.hpp"
#include "slowlight/quantum.hpp"
#include "slowlight/scenario.hpp"
#include "slowlight/table.hpp"

namespace slowlight {

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "SLOWLIGHT_OUTPUT_DIR";

/// The scenario lies outside the validity regime and was not forced.
class RegimeViolation : public std::runtime_error {
 public:
  RegimeViolation(const std::string& what, RegimeReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const RegimeReport& report() const { return report_; }

 private:
  RegimeReport report_;
};

struct ScenarioResult {
  Table table;
  std::optional<Table> oracle;
  RegimeReport regime;
  std::vector<std::string> warnings;
};

struct ExitReport {
  std::vector<std::filesystem::path> tables_written;
  std::vector<std::string> warnings;
  RegimeReport regime;
};

namespace detail {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

inline void write_header(Table& t, const Scenario& s, const RegimeReport& regime, bool uses_pulses) {
  t.set_meta("slowlight.experiment", to_string(s.experiment));
  t.set_meta("label", s.label);
  t.set_meta("units", "c = 1; rates in units of the reference linewidth, gamma_ab = " +
                          format_number(s.medium.gamma_ab));
  if (s.force && !regime.all_ok()) {
    t.set_meta("forced", true);
    t.add_note("FORCED RUN: regime gate bypassed, closed-form results may not apply");
  }
  if (s.preset) {
    t.set_meta("medium.preset", *s.preset);
  }
  t.set_meta("medium.gamma_ab", s.medium.gamma_ab);
  t.set_meta("medium.gamma_bc", s.medium.gamma_bc);
  t.set_meta("medium.gamma_cd", s.medium.gamma_cd);
  t.set_meta("medium.delta", s.medium.delta);
  t.set_meta("medium.omega_drive", s.medium.omega_drive);
  t.set_meta("medium.n_atoms", s.medium.n_atoms);
  t.set_meta("medium.sigma_over_area", s.medium.sigma_over_area);
  t.set_meta("medium.length", s.medium.length);
  t.set_meta("medium.c_light", s.medium.c_light);
  t.set_meta("run.bandwidth", s.bandwidth);
  t.set_meta("pulse.duration", s.pulse1.duration);
  if (uses_pulses) {
    t.set_meta("pulse.photon_number", s.pulse1.photon_number);
    t.set_meta("pulse.center", s.pulse1.center);
    t.set_meta("pulse.photon_number_2", s.pulse2.photon_number);
    t.set_meta("pulse.duration_2", s.pulse2.duration);
    t.set_meta("pulse.center_2", s.pulse2.center);
  }
  t.set_meta("regime.saturation_ratio", regime.saturation_ratio);
  t.set_meta("regime.dark_state_product", regime.dark_state_product);
  t.set_meta("regime.bandwidth_ratio", regime.bandwidth_ratio);
  if (regime.pulse_ratio) {
    t.set_meta("regime.pulse_ratio", *regime.pulse_ratio);
  }
  t.set_meta("regime.saturated", regime.saturated);
  t.set_meta("regime.dark_state_ok", regime.dark_state_ok);
  t.set_meta("regime.bandwidth_ok", regime.bandwidth_ok);
  if (regime.pulse_ok) {
    t.set_meta("regime.pulse_ok", *regime.pulse_ok);
  }
  for (const auto& m : regime.messages) {
    t.add_note("regime: " + m);
  }
}

inline Table run_params(const Scenario& s) {
  const auto d = derive_coefficients(s.medium);
  Table t({{"g_coupling", "rate"},
           {"n_group"},
           {"v_group", "c"},
           {"kappa", "1/length"},
           {"beta", "time^2/length"},
           {"eta", "1/(length*field^2)", true},
           {"tau_g", "time"},
           {"optical_depth"},
           {"delta_omega_max", "rate"},
           {"tau_spread", "time"},
           {"delay_bandwidth"},
           {"drive_delay_product"},
           {"classical_phase", "rad"},
           {"quantum_phase", "rad"}});
  const double delay_bw = d.tau_g * d.delta_omega_max;
  const double chain = s.medium.omega_drive * s.medium.omega_drive * d.tau_g / s.medium.gamma_ab;
  const double classical = classical_phase_shift(s.medium, s.pulse1.photon_number, s.pulse1.duration);
  const double quantum = quantum_phase_shift(s.medium, s.bandwidth);
  t.add_row({d.g_coupling, d.n_group, d.v_group, d.kappa, d.beta, d.eta, d.tau_g, d.optical_depth,
             d.delta_omega_max, d.tau_spread(s.pulse1.duration), delay_bw, chain, classical, quantum});
  t.add_note("delay-bandwidth: tau_g * delta_omega_max = " + format_number(delay_bw) +
             " = sqrt(Omega^2 tau_g / gamma_ab = " + format_number(chain) +
             ") = sqrt(sigma N / (2A) = " + format_number(d.optical_depth) + ")");
  t.add_note("classical phase shift at E = " + format_number(s.pulse1.photon_number) +
             " photons, T = " + format_number(s.pulse1.duration) + ": " + format_number(classical) + " rad" +
             (classical >= pi ? " (>= pi)" : ""));
  t.add_note("classical_phase takes pulse.duration as the T of the group-delay formula, an intensity half width; "
             "generated envelopes use pulse.duration as the intensity FWHM");
  return t;
}

inline Table run_spectrum(const Scenario& s) {
  const auto d = derive_coefficients(s.medium);
  const double z = s.spectrum.z.value_or(s.medium.length);
  const double wmax = s.spectrum.omega_max.value_or(3.0 * d.delta_omega_max_at(z));
  const auto grid = linspace(-wmax, wmax, s.spectrum.points);
  Table t({{"omega", "rate"}, {"amplitude"}, {"transmission"}, {"phase", "rad"}});
  t.set_meta("spectrum.z", z);
  t.set_meta("spectrum.omega_max", wmax);
  t.set_meta("spectrum.points", static_cast<double>(s.spectrum.points));
  t.set_meta("spectrum.probe_intensity", s.spectrum.probe_intensity);
  t.set_meta("spectrum.delta_omega_max", d.delta_omega_max_at(z));
  for (const auto& p : transparency_spectrum(d, z, grid, s.spectrum.probe_intensity)) {
    t.add_row({p.omega, p.amplitude, p.transmission, p.phase});
  }
  return t;
}

inline TimeGrid pulse_grid(const Scenario& s) {
  const double longest = std::max(s.pulse1.duration, s.pulse2.duration);
  const double lo = std::min(s.pulse1.center, s.pulse2.center) - s.grid.span * longest;
  const double hi = std::max(s.pulse1.center, s.pulse2.center) + s.grid.span * longest;
  return TimeGrid(s.grid.points, lo, hi);
}

inline ScenarioResult run_propagate(const Scenario& s, ScenarioResult r) {
  DerivedCoefficients d = derive_coefficients(s.medium);
  if (s.propagate.disable_loss) {
    d.kappa = 0;
  }
  if (s.propagate.disable_spreading) {
    d.beta = 0;
  }
  const double z = s.propagate.z.value_or(s.medium.length);
  const TimeGrid grid = pulse_grid(s);
  const Envelope e1 = make_gaussian_pulse(grid, s.pulse1.photon_number, s.pulse1.duration, s.pulse1.center, s.bandwidth);
  const Envelope e2 = make_gaussian_pulse(grid, s.pulse2.photon_number, s.pulse2.duration, s.pulse2.center, s.bandwidth);
  PropagationOptions opts;
  opts.imag_eta_loss = s.propagate.imag_eta_loss;
  const PropagationResult res = propagate_pair(e1, e2, d, z, s.propagate.steps, opts);

  Table& t = r.table;
  t = Table({{"t", "time"}, {"e1_in", "field", true}, {"e2_in", "field", true}, {"e1_out", "field", true},
             {"e2_out", "field", true}});
  t.set_meta("grid.points", static_cast<double>(grid.size()));
  t.set_meta("grid.span", s.grid.span);
  t.set_meta("grid.t_min", grid.t_min());
  t.set_meta("grid.t_max", grid.t_max());
  t.set_meta("propagate.z", z);
  t.set_meta("propagate.steps", static_cast<double>(s.propagate.steps));
  t.set_meta("propagate.disable_loss", s.propagate.disable_loss);
  t.set_meta("propagate.disable_spreading", s.propagate.disable_spreading);
  t.set_meta("propagate.imag_eta_loss", s.propagate.imag_eta_loss);
  t.set_meta("coeff.kappa", d.kappa);
  t.set_meta("coeff.beta", d.beta);
  t.set_meta("coeff.eta_re", d.eta.real());
  t.set_meta("coeff.eta_im", d.eta.imag());
  t.set_meta("result.photons_in_1", res.energy_in1);
  t.set_meta("result.photons_in_2", res.energy_in2);
  t.set_meta("result.photons_out_1", res.energy_out1);
  t.set_meta("result.photons_out_2", res.energy_out2);
  t.set_meta("result.max_step_phase", res.max_step_phase);
  const auto m1 = pulse_metrics(res.env1_out);
  const auto m2 = pulse_metrics(res.env2_out);
  if (m1.peak_phase) {
    t.set_meta("result.peak_phase_1", *m1.peak_phase);
    t.set_meta("result.rms_duration_1", *m1.rms_duration);
  }
  if (m2.peak_phase) {
    t.set_meta("result.peak_phase_2", *m2.peak_phase);
    t.set_meta("result.rms_duration_2", *m2.rms_duration);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.add_row({grid.time(i), e1.samples[i], e2.samples[i], res.env1_out.samples[i], res.env2_out.samples[i]});
  }
  if (res.edge_warning) {
    r.warnings.push_back("propagated pulse reaches the time-window edge; increase grid.span");
  }
  for (const auto* e : {&e1, &e2}) {
    if (const double f = out_of_band_fraction(*e); f > 1e-3) {
      r.warnings.push_back("input pulse has " + format_number(f) +
                           " of its spectral power outside the detection bandwidth");
    }
  }

  if (s.oracle) {
    const auto [x1, x2] = analytic_xpm(e1, e2, d.eta.real(), z);
    double peak = 0, err = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      peak = std::max({peak, std::abs(x1.samples[i]), std::abs(x2.samples[i])});
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      err = std::max({err, std::abs(res.env1_out.samples[i] - x1.samples[i]),
                      std::abs(res.env2_out.samples[i] - x2.samples[i])});
    }
    Table o({{"t", "time"}, {"e1_xpm", "field", true}, {"e2_xpm", "field", true}});
    o.set_meta("oracle", "analytic_xpm");
    o.set_meta("oracle.max_relative_error", peak > 0 ? err / peak : 0.0);
    if (d.kappa != 0 || d.beta != 0 || s.propagate.imag_eta_loss) {
      o.add_note("closed form neglects loss and spreading; agreement expected only when both are disabled");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      o.add_row({grid.time(i), x1.samples[i], x2.samples[i]});
    }
    r.oracle = std::move(o);
  }
  return r;
}

inline double default_nbar(const Scenario& s) {
  return gaussian_peak_intensity(s.pulse2.photon_number, s.pulse2.duration) / s.bandwidth;
}

inline ScenarioResult run_revival(const Scenario& s, ScenarioResult r) {
  const double nbar = s.revival.nbar.value_or(default_nbar(s));
  const auto phis = linspace(0.0, s.revival.phi_max, s.revival.points);
  Table& t = r.table;
  t = Table({{"phi", "rad"}, {"modulus"}, {"arg", "rad"}, {"mean", "field", true}});
  t.set_meta("revival.nbar", nbar);
  t.set_meta("revival.phi_max", s.revival.phi_max);
  t.set_meta("revival.points", static_cast<double>(s.revival.points));
  for (const auto& p : collapse_revival_scan(nbar, phis)) {
    t.add_row({p.phi, p.modulus, p.arg, coherent_mean_field(nbar, 1.0, p.phi)});
  }
  if (s.oracle) {
    const cplx alpha2(std::sqrt(nbar), 0.0);
    Table o({{"phi", "rad"}, {"oracle_mean", "field", true}, {"abs_error"}});
    o.set_meta("oracle", "kerr_oracle_mean");
    o.set_meta("oracle.truncation", static_cast<double>(std::max(fock_truncation(1.0), fock_truncation(alpha2))));
    double worst = 0;
    for (double phi : phis) {
      const cplx fock = kerr_oracle_mean(1.0, alpha2, phi);
      const double e = std::abs(fock - coherent_mean_field(nbar, 1.0, phi));
      worst = std::max(worst, e);
      o.add_row({phi, fock, e});
    }
    o.set_meta("oracle.max_abs_error", worst);
    r.oracle = std::move(o);
  }
  return r;
}

inline Table run_cat(const Scenario& s) {
  const cplx a1 = s.cat.alpha1, a2 = s.cat.alpha2;
  const TwoModeState in = coherent_product_state(a1, a2);
  const auto phis = linspace(0.0, s.cat.phi_max, s.cat.points);
  Table t({{"phi", "rad"}, {"cat_fidelity"}, {"entropy", "nats"}, {"mean_fock", "field", true},
           {"mean_closed", "field", true}});
  t.set_meta("cat.alpha1", format_number(a1.real()) + " " + format_number(a1.imag()));
  t.set_meta("cat.alpha2", format_number(a2.real()) + " " + format_number(a2.imag()));
  t.set_meta("cat.phi_max", s.cat.phi_max);
  t.set_meta("cat.points", static_cast<double>(s.cat.points));
  t.set_meta("fock.dim1", static_cast<double>(in.dim1()));
  t.set_meta("fock.dim2", static_cast<double>(in.dim2()));
  t.set_meta("fock.norm_deficit", in.norm_deficit);
  const TwoModeState at_pi = apply_cross_kerr(in, pi);
  t.set_meta("result.fidelity_at_pi", cat_fidelity(at_pi, a1, a2));
  t.set_meta("result.entropy_at_pi", entanglement_entropy(at_pi));
  const std::size_t trunc = std::max(in.dim1(), in.dim2());
  for (double phi : phis) {
    const TwoModeState st = apply_cross_kerr(in, phi);
    t.add_row({phi, cat_fidelity(st, a1, a2), entanglement_entropy(st), kerr_oracle_mean(a1, a2, phi, trunc),
               coherent_mean_field(std::norm(a2), a1, phi)});
  }
  return t;
}

inline Table run_pair(const Scenario& s) {
  const double phi = s.pair.phi.value_or(quantum_phase_shift(s.medium, s.bandwidth));
  const auto p1 = gaussian_single_photon(s.pulse1.duration);
  const auto p2 = gaussian_single_photon(s.pulse2.duration);
  const double half = s.pair.span * std::max(s.pulse1.duration, s.pulse2.duration);
  const auto times = linspace(-half, half, s.pair.points);
  const CorrelationGrid g = photon_pair_correlation(p1, p2, phi, s.bandwidth, times, times);
  Table t({{"t1", "time"}, {"t2", "time"}, {"psi12", "field^2", true}, {"factor", "1", true}});
  t.set_meta("pair.phi", phi);
  t.set_meta("pair.points", static_cast<double>(s.pair.points));
  t.set_meta("pair.span", s.pair.span);
  t.set_meta("result.norm_integral", g.norm_integral());
  t.add_note("times are t'' = t - l/v_g - (z - l)/c; the norm integral is a diagnostic, not a constraint");
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      t.add_row({times[i], times[j], g.at(i, j), pair_factor(phi, s.bandwidth, times[i] - times[j])});
    }
  }
  return t;
}

struct SweepRow {
  std::vector<Cell> cells;
  std::string error;
};

inline SweepRow sweep_point(const Scenario& base, double value) {
  Scenario s = base;
  const std::string& p = base.sweep.parameter;
  double MediumParams::*fields[] = {&MediumParams::gamma_ab,    &MediumParams::gamma_bc, &MediumParams::gamma_cd,
                                    &MediumParams::delta,       &MediumParams::omega_drive,
                                    &MediumParams::n_atoms,     &MediumParams::sigma_over_area,
                                    &MediumParams::length};
  const auto& names = sweepable_parameters();
  const auto idx = static_cast<std::size_t>(std::find(names.begin(), names.end(), p) - names.begin());
  if (idx < 8) {
    s.medium.*fields[idx] = value;
  } else if (p == "bandwidth") {
    s.bandwidth = value;
  } else if (p == "photon_number") {
    s.pulse1.photon_number = value;
  } else if (p == "duration") {
    s.pulse1.duration = value;
  }
  SweepRow row;
  try {
    const auto d = derive_coefficients(s.medium);
    const auto reg = validate_regime(s.medium, s.bandwidth, s.pulse1.duration);
    row.cells = {value,
                 d.n_group,
                 d.tau_g,
                 d.delta_omega_max,
                 d.tau_g * d.delta_omega_max,
                 d.kappa,
                 d.eta.real(),
                 classical_phase_shift(s.medium, s.pulse1.photon_number, s.pulse1.duration),
                 quantum_phase_shift(s.medium, s.bandwidth),
                 reg.saturation_ratio,
                 reg.saturated ? 1.0 : 0.0,
                 reg.dark_state_ok ? 1.0 : 0.0,
                 reg.bandwidth_ok ? 1.0 : 0.0,
                 reg.pulse_ok.value_or(true) ? 1.0 : 0.0};
  } catch (const std::invalid_argument& e) {
    row.error = "sweep point " + p + " = " + format_number(value) + ": " + e.what();
  }
  return row;
}

inline Table run_sweep(const Scenario& s) {
  const auto& sw = s.sweep;
  std::vector<double> values(sw.count);
  for (std::size_t i = 0; i < sw.count; ++i) {
    const double f = sw.count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(sw.count - 1);
    values[i] = sw.log_scale ? sw.from * std::pow(sw.to / sw.from, f) : sw.from + (sw.to - sw.from) * f;
  }

  // Points are independent; fan out over contiguous chunks, collect in order.
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, values.size()));
  std::vector<std::future<std::vector<SweepRow>>> jobs;
  const std::size_t chunk = (values.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < values.size(); begin += chunk) {
    const std::size_t end = std::min(values.size(), begin + chunk);
    jobs.push_back(std::async(std::launch::async, [&s, &values, begin, end] {
      std::vector<SweepRow> rows;
      for (std::size_t i = begin; i < end; ++i) {
        rows.push_back(sweep_point(s, values[i]));
      }
      return rows;
    }));
  }

  Table t({{sw.parameter},
           {"n_group"},
           {"tau_g", "time"},
           {"delta_omega_max", "rate"},
           {"delay_bandwidth"},
           {"kappa", "1/length"},
           {"eta_re", "1/(length*field^2)"},
           {"classical_phase", "rad"},
           {"quantum_phase", "rad"},
           {"saturation_ratio"},
           {"saturated"},
           {"dark_state_ok"},
           {"bandwidth_ok"},
           {"pulse_ok"}});
  t.set_meta("sweep.parameter", sw.parameter);
  t.set_meta("sweep.from", sw.from);
  t.set_meta("sweep.to", sw.to);
  t.set_meta("sweep.count", static_cast<double>(sw.count));
  t.set_meta("sweep.scale", sw.log_scale ? "log" : "linear");
  for (auto& job : jobs) {
    for (auto& row : job.get()) {
      if (!row.error.empty()) {
        throw std::invalid_argument(row.error);
      }
      t.add_row(std::move(row.cells));
    }
  }
  return t;
}

} // namespace detail

/// Computes every table of a scenario without touching the filesystem.
/// Throws RegimeViolation when the regime gate fails and the scenario is not
/// forced.
inline ScenarioResult compute_scenario(const Scenario& s) {
  ScenarioResult r;
  r.regime = validate_regime(s.medium, s.bandwidth, s.pulse1.duration);
  if (!r.regime.all_ok() && !s.force) {
    std::string msg = "scenario '" + s.label + "' violates the validity regime";
    for (const auto& m : r.regime.messages) {
      msg += "\n  " + m;
    }
    msg += "\n(pass --force to run anyway)";
    throw RegimeViolation(msg, r.regime);
  }

  bool uses_pulses = false;
  try {
    switch (s.experiment) {
      case Experiment::params: r.table = detail::run_params(s); uses_pulses = true; break;
      case Experiment::spectrum: r.table = detail::run_spectrum(s); break;
      case Experiment::propagate: r = detail::run_propagate(s, std::move(r)); uses_pulses = true; break;
      case Experiment::revival: r = detail::run_revival(s, std::move(r)); uses_pulses = !s.revival.nbar; break;
      case Experiment::cat: r.table = detail::run_cat(s); break;
      case Experiment::pair: r.table = detail::run_pair(s); uses_pulses = true; break;
      case Experiment::sweep: r.table = detail::run_sweep(s); uses_pulses = true; break;
    }
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string(to_string(s.experiment)) + " scenario '" + s.label + "': " + e.what());
  }

  // Header block first: rebuild so that the shared metadata precedes the
  // experiment-specific keys.
  auto with_header = [&](const Table& body) {
    Table t(body.columns());
    detail::write_header(t, s, r.regime, uses_pulses);
    for (const auto& [k, v] : body.metadata()) {
      t.set_meta(k, v);
    }
    for (const auto& n : body.notes()) {
      t.add_note(n);
    }
    for (const auto& w : r.warnings) {
      t.add_note("warning: " + w);
    }
    for (const auto& row : body.rows()) {
      t.add_row(row);
    }
    return t;
  };
  r.table = with_header(r.table);
  if (r.oracle) {
    r.oracle = with_header(*r.oracle);
  }
  return r;
}

/// Where a scenario's main table goes when no explicit path is given.
inline std::filesystem::path default_output_path(const Scenario& s) {
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv(output_dir_env); env && *env) {
    dir = env;
  }
  return dir / (s.label + ".tsv");
}

inline std::filesystem::path oracle_path_for(const std::filesystem::path& main) {
  std::filesystem::path p = main;
  p.replace_extension();
  return p.string() + ".oracle" + main.extension().string();
}

/// Computes the scenario and writes its tables.
inline ExitReport run_scenario(const Scenario& s) {
  const ScenarioResult r = compute_scenario(s);
  ExitReport rep;
  rep.regime = r.regime;
  rep.warnings = r.warnings;
  if (s.oracle && !r.oracle) {
    rep.warnings.push_back(std::string("no closed-form oracle table for experiment '") + to_string(s.experiment) +
                           "'");
  }
  const auto path = s.output_path.value_or(default_output_path(s));
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  emit_table(r.table, path);
  rep.tables_written.push_back(path);
  if (r.oracle) {
    const auto opath = oracle_path_for(path);
    emit_table(*r.oracle, opath);
    rep.tables_written.push_back(opath);
  }
  return rep;
}

} // namespace slowlight

#endif
