#ifndef SLOWLIGHT_SCENARIO_HPP
#define SLOWLIGHT_SCENARIO_HPP

// Scenario documents: INI-style [section] key = value files. The accepted keys
// are listed in docs/scenario-format.md; anything else is rejected so that a
// typo cannot silently fall back to a default.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "slowlight/medium.hpp"
#include "slowlight/table.hpp"

namespace slowlight {

enum class Experiment { params, spectrum, propagate, revival, cat, pair, sweep };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::params: return "params";
    case Experiment::spectrum: return "spectrum";
    case Experiment::propagate: return "propagate";
    case Experiment::revival: return "revival";
    case Experiment::cat: return "cat";
    case Experiment::pair: return "pair";
    case Experiment::sweep: return "sweep";
  }
  return "?";
}

inline std::optional<Experiment> experiment_from_string(std::string_view s) {
  for (auto e : {Experiment::params, Experiment::spectrum, Experiment::propagate, Experiment::revival,
                 Experiment::cat, Experiment::pair, Experiment::sweep}) {
    if (s == to_string(e)) {
      return e;
    }
  }
  return std::nullopt;
}

/// Raised for malformed scenario documents; the message names the key.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PulseSpec {
  double photon_number = 1.0;
  double duration = 0; // intensity FWHM
  double center = 0;
};

struct GridSpec {
  std::size_t points = 1024;
  double span = 8.0; // window margin beyond the outer pulse centres, in durations
};

struct PropagateSpec {
  std::optional<double> z; // defaults to the medium length
  std::size_t steps = 128;
  bool disable_loss = false;
  bool disable_spreading = false;
  bool imag_eta_loss = false;
};

struct SpectrumSpec {
  std::optional<double> z;
  std::optional<double> omega_max; // defaults to 3 delta_omega_max(z)
  std::size_t points = 201;
  double probe_intensity = 0;
};

struct RevivalSpec {
  std::optional<double> nbar; // defaults to the second pulse's peak |alpha|^2 / bandwidth
  double phi_max = 2.0 * pi;
  std::size_t points = 401;
};

struct CatSpec {
  std::complex<double> alpha1{2.0, 0.0};
  std::complex<double> alpha2{2.0, 0.0};
  double phi_max = 2.0 * pi;
  std::size_t points = 65;
};

struct PairSpec {
  std::optional<double> phi; // defaults to quantum_phase_shift(medium, bandwidth)
  std::size_t points = 65;
  double span = 3.0; // +-span durations
};

struct SweepSpec {
  std::string parameter;
  double from = 0;
  double to = 0;
  std::size_t count = 0;
  bool log_scale = false;
};

struct Scenario {
  Experiment experiment = Experiment::params;
  std::string label;
  std::optional<std::string> preset;
  MediumParams medium;
  double bandwidth = 0;
  PulseSpec pulse1;
  PulseSpec pulse2;
  std::optional<std::filesystem::path> output_path;
  bool force = false;
  bool oracle = false;

  GridSpec grid;
  PropagateSpec propagate;
  SpectrumSpec spectrum;
  RevivalSpec revival;
  CatSpec cat;
  PairSpec pair;
  SweepSpec sweep;
};

/// Parameters a sweep may vary.
inline const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {"gamma_ab", "gamma_bc",        "gamma_cd", "delta",
                                                 "omega_drive", "n_atoms",      "sigma_over_area", "length",
                                                 "bandwidth",   "photon_number", "duration"};
  return names;
}

namespace detail {

namespace pt = boost::property_tree;

class SectionReader {
 public:
  SectionReader(const pt::ptree* section, std::string name) : s_(section), name_(std::move(name)) {}

  bool present() const { return s_ != nullptr; }

  std::optional<std::string> text(const std::string& key) {
    seen_.insert(key);
    if (!s_) {
      return std::nullopt;
    }
    auto child = s_->get_child_optional(key);
    if (!child) {
      return std::nullopt;
    }
    return std::string(trim(child->data()));
  }

  std::optional<double> number(const std::string& key) {
    auto t = text(key);
    if (!t) {
      return std::nullopt;
    }
    try {
      const double v = parse_number(*t);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite");
      }
      return v;
    } catch (const std::invalid_argument&) {
      throw ScenarioError(qualified(key) + ": expected a finite number, got '" + *t + "'");
    }
  }

  std::optional<double> positive(const std::string& key) {
    auto v = number(key);
    if (v && !(*v > 0)) {
      throw ScenarioError(qualified(key) + " must be > 0 (got " + num(*v) + ")");
    }
    return v;
  }

  std::optional<double> non_negative(const std::string& key) {
    auto v = number(key);
    if (v && !(*v >= 0)) {
      throw ScenarioError(qualified(key) + " must be >= 0 (got " + num(*v) + ")");
    }
    return v;
  }

  std::optional<std::size_t> count(const std::string& key, std::size_t min_value) {
    auto v = number(key);
    if (!v) {
      return std::nullopt;
    }
    if (*v != std::floor(*v) || *v < static_cast<double>(min_value) || *v > 1e8) {
      throw ScenarioError(qualified(key) + " must be an integer >= " + std::to_string(min_value) + " (got " +
                          num(*v) + ")");
    }
    return static_cast<std::size_t>(*v);
  }

  std::optional<bool> flag(const std::string& key) {
    auto t = text(key);
    if (!t) {
      return std::nullopt;
    }
    if (*t == "true" || *t == "1" || *t == "yes") {
      return true;
    }
    if (*t == "false" || *t == "0" || *t == "no") {
      return false;
    }
    throw ScenarioError(qualified(key) + ": expected true/false, got '" + *t + "'");
  }

  /// Every key present in the section must have been asked for.
  void reject_unknown() const {
    if (!s_) {
      return;
    }
    for (const auto& [key, child] : *s_) {
      if (!child.empty()) {
        throw ScenarioError("[" + name_ + "] has nested content under '" + key + "'");
      }
      if (!seen_.count(key)) {
        throw ScenarioError("unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

 private:
  const pt::ptree* s_;
  std::string name_;
  std::set<std::string> seen_;
};

} // namespace detail

/// Parses and validates a scenario document. `experiment` (from the CLI
/// subcommand) takes precedence over [run] experiment.
inline Scenario parse_scenario(std::string_view text, std::optional<Experiment> experiment = std::nullopt) {
  namespace pt = boost::property_tree;
  pt::ptree root;
  {
    std::istringstream is{std::string(text)};
    try {
      pt::read_ini(is, root);
    } catch (const pt::ini_parser_error& e) {
      throw ScenarioError("line " + std::to_string(e.line()) + ": " + e.message());
    }
  }

  static const std::set<std::string> known_sections = {"run",     "medium",   "pulse", "grid", "propagate",
                                                       "spectrum", "revival", "cat",   "pair", "sweep"};
  for (const auto& [name, child] : root) {
    if (!known_sections.count(name)) {
      if (child.empty()) {
        throw ScenarioError("key '" + name + "' appears outside any [section]");
      }
      throw ScenarioError("unknown section [" + name + "]");
    }
  }
  auto section = [&](const std::string& name) {
    auto c = root.get_child_optional(name);
    return detail::SectionReader(c ? &*c : nullptr, name);
  };

  Scenario s;

  // [run]
  auto run = section("run");
  auto exp_text = run.text("experiment");
  if (experiment) {
    s.experiment = *experiment;
  } else if (exp_text) {
    auto e = experiment_from_string(*exp_text);
    if (!e) {
      throw ScenarioError("run.experiment: unknown experiment '" + *exp_text + "'");
    }
    s.experiment = *e;
  } else {
    throw ScenarioError("missing required key run.experiment (or give a subcommand)");
  }
  s.label = run.text("label").value_or(to_string(s.experiment));
  if (auto out = run.text("output")) {
    s.output_path = *out;
  }
  auto bandwidth = run.positive("bandwidth");
  s.force = run.flag("force").value_or(false);
  run.reject_unknown();

  // [medium]
  auto med = section("medium");
  std::optional<Preset> preset;
  if (auto name = med.text("preset")) {
    preset = find_preset(*name);
    if (!preset) {
      throw ScenarioError("medium.preset: unknown preset '" + *name + "'");
    }
    s.preset = *name;
    s.medium = preset->medium;
  }
  struct Field {
    const char* key;
    double MediumParams::*member;
  };
  static const Field positive_fields[] = {
      {"gamma_ab", &MediumParams::gamma_ab},       {"gamma_bc", &MediumParams::gamma_bc},
      {"gamma_cd", &MediumParams::gamma_cd},       {"omega_drive", &MediumParams::omega_drive},
      {"sigma_over_area", &MediumParams::sigma_over_area}, {"length", &MediumParams::length},
  };
  for (const auto& f : positive_fields) {
    if (auto v = med.positive(f.key)) {
      s.medium.*f.member = *v;
    } else if (!preset) {
      throw ScenarioError(std::string("missing required key medium.") + f.key + " (or set medium.preset)");
    }
  }
  if (auto v = med.number("delta")) {
    if (*v == 0) {
      throw ScenarioError("medium.delta must be nonzero");
    }
    s.medium.delta = *v;
  } else if (!preset) {
    throw ScenarioError("missing required key medium.delta (or set medium.preset)");
  }
  auto n_atoms = med.positive("n_atoms");
  auto n_group = med.positive("n_group");
  if (n_atoms && n_group) {
    throw ScenarioError("medium.n_atoms and medium.n_group are mutually exclusive");
  }
  if (n_atoms) {
    s.medium.n_atoms = *n_atoms;
  } else if (n_group) {
    s.medium = with_group_index(s.medium, *n_group);
  } else if (!preset) {
    throw ScenarioError("missing required key medium.n_atoms or medium.n_group (or set medium.preset)");
  }
  med.reject_unknown();
  try {
    validate(s.medium);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("medium.") + e.what());
  }

  if (bandwidth) {
    s.bandwidth = *bandwidth;
  } else if (preset) {
    s.bandwidth = preset->bandwidth;
  } else {
    throw ScenarioError("missing required key run.bandwidth (or set medium.preset)");
  }

  // [pulse]
  auto pulse = section("pulse");
  s.pulse1.photon_number = pulse.non_negative("photon_number").value_or(1.0);
  if (auto d = pulse.positive("duration")) {
    s.pulse1.duration = *d;
  } else if (preset) {
    s.pulse1.duration = preset->pulse_duration;
  } else {
    throw ScenarioError("missing required key pulse.duration (or set medium.preset)");
  }
  s.pulse1.center = pulse.number("center").value_or(0.0);
  s.pulse2.photon_number = pulse.non_negative("photon_number_2").value_or(s.pulse1.photon_number);
  s.pulse2.duration = pulse.positive("duration_2").value_or(s.pulse1.duration);
  s.pulse2.center = pulse.number("center_2").value_or(s.pulse1.center);
  pulse.reject_unknown();

  // [grid]
  auto grid = section("grid");
  if (auto n = grid.count("points", 8)) {
    if ((*n & (*n - 1)) != 0) {
      throw ScenarioError("grid.points must be a power of two (got " + std::to_string(*n) + ")");
    }
    s.grid.points = *n;
  }
  s.grid.span = grid.positive("span").value_or(s.grid.span);
  grid.reject_unknown();

  // [propagate]
  auto prop = section("propagate");
  s.propagate.z = prop.positive("z");
  s.propagate.steps = prop.count("steps", 1).value_or(s.propagate.steps);
  s.propagate.disable_loss = prop.flag("disable_loss").value_or(false);
  s.propagate.disable_spreading = prop.flag("disable_spreading").value_or(false);
  s.propagate.imag_eta_loss = prop.flag("imag_eta_loss").value_or(false);
  prop.reject_unknown();
  if (s.propagate.z && *s.propagate.z > s.medium.length) {
    throw ScenarioError("propagate.z must be <= medium.length (" + detail::num(s.medium.length) + ")");
  }

  // [spectrum]
  auto spec = section("spectrum");
  s.spectrum.z = spec.positive("z");
  s.spectrum.omega_max = spec.positive("omega_max");
  s.spectrum.points = spec.count("points", 1).value_or(s.spectrum.points);
  s.spectrum.probe_intensity = spec.non_negative("probe_intensity").value_or(0.0);
  spec.reject_unknown();
  if (s.spectrum.z && *s.spectrum.z > s.medium.length) {
    throw ScenarioError("spectrum.z must be <= medium.length (" + detail::num(s.medium.length) + ")");
  }

  // [revival]
  auto rev = section("revival");
  s.revival.nbar = rev.non_negative("nbar");
  s.revival.phi_max = rev.positive("phi_max").value_or(s.revival.phi_max);
  s.revival.points = rev.count("points", 2).value_or(s.revival.points);
  rev.reject_unknown();

  // [cat]
  auto cat = section("cat");
  s.cat.alpha1 = {cat.number("alpha1").value_or(2.0), cat.number("alpha1_im").value_or(0.0)};
  s.cat.alpha2 = {cat.number("alpha2").value_or(2.0), cat.number("alpha2_im").value_or(0.0)};
  s.cat.phi_max = cat.positive("phi_max").value_or(s.cat.phi_max);
  s.cat.points = cat.count("points", 2).value_or(s.cat.points);
  cat.reject_unknown();
  for (auto [name, a] : {std::pair{"cat.alpha1", s.cat.alpha1}, std::pair{"cat.alpha2", s.cat.alpha2}}) {
    if (std::abs(a) > 4.0) {
      throw ScenarioError(std::string(name) + ": |alpha| must be <= 4 (got " + detail::num(std::abs(a)) + ")");
    }
  }

  // [pair]
  auto pair = section("pair");
  s.pair.phi = pair.number("phi");
  s.pair.points = pair.count("points", 2).value_or(s.pair.points);
  s.pair.span = pair.positive("span").value_or(s.pair.span);
  pair.reject_unknown();

  // [sweep]
  auto sweep = section("sweep");
  if (auto p = sweep.text("parameter")) {
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), *p) == names.end()) {
      throw ScenarioError("sweep.parameter: cannot sweep '" + *p + "'");
    }
    s.sweep.parameter = *p;
  }
  auto from = sweep.number("from");
  auto to = sweep.number("to");
  auto cnt = sweep.count("count", 1);
  if (auto scale = sweep.text("scale")) {
    if (*scale == "log") {
      s.sweep.log_scale = true;
    } else if (*scale != "linear") {
      throw ScenarioError("sweep.scale must be 'linear' or 'log' (got '" + *scale + "')");
    }
  }
  sweep.reject_unknown();
  if (s.experiment == Experiment::sweep) {
    if (s.sweep.parameter.empty()) {
      throw ScenarioError("missing required key sweep.parameter");
    }
    if (!from || !to || !cnt) {
      throw ScenarioError(std::string("missing required key sweep.") + (!from ? "from" : !to ? "to" : "count"));
    }
    if (s.sweep.log_scale && !(*from > 0 && *to > 0)) {
      throw ScenarioError("sweep.from and sweep.to must be > 0 for a log sweep");
    }
    s.sweep.from = *from;
    s.sweep.to = *to;
    s.sweep.count = *cnt;
  }

  return s;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path,
                                    std::optional<Experiment> experiment = std::nullopt) {
  std::ifstream is(path);
  if (!is) {
    throw ScenarioError("cannot open scenario '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str(), experiment);
}

} // namespace slowlight

#endif
