// slowlight: run a scenario file and write plot-ready tables.
//
// Exit status: 0 on success, 1 on configuration or runtime errors, 2 when the
// scenario falls outside the validity regime and --force was not given.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "slowlight/run.hpp"
#include "slowlight/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::string> out;
  bool force = false;
  bool oracle = false;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> points;
};

// --points means the natural sample count of each experiment.
void apply_points(slowlight::Scenario& s, std::size_t n) {
  using slowlight::Experiment;
  switch (s.experiment) {
    case Experiment::spectrum: s.spectrum.points = n; break;
    case Experiment::propagate: s.grid.points = n; break;
    case Experiment::revival: s.revival.points = n; break;
    case Experiment::cat: s.cat.points = n; break;
    case Experiment::pair: s.pair.points = n; break;
    case Experiment::sweep: s.sweep.count = n; break;
    case Experiment::params: break;
  }
}

int run(slowlight::Experiment exp, const Options& o) {
  slowlight::Scenario s = slowlight::parse_scenario_file(o.config, exp);
  if (o.out) {
    s.output_path = *o.out;
  }
  s.force = s.force || o.force;
  s.oracle = o.oracle;
  if (o.steps) {
    s.propagate.steps = *o.steps;
  }
  if (o.points) {
    apply_points(s, *o.points);
  }
  const auto rep = slowlight::run_scenario(s);
  for (const auto& w : rep.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  if (!rep.regime.all_ok()) {
    std::cerr << "warning: forced run outside the validity regime\n";
  }
  for (const auto& p : rep.tables_written) {
    std::cout << p.string() << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"EIT slow-light cross-phase modulation simulator"};
  app.require_subcommand(1);
  Options o;

  std::optional<slowlight::Experiment> chosen;
  for (auto exp : {slowlight::Experiment::params, slowlight::Experiment::spectrum, slowlight::Experiment::propagate,
                   slowlight::Experiment::revival, slowlight::Experiment::cat, slowlight::Experiment::pair,
                   slowlight::Experiment::sweep}) {
    auto* sub = app.add_subcommand(slowlight::to_string(exp));
    sub->add_option("--config", o.config, "scenario file (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output table path");
    sub->add_flag("--force", o.force, "run even if the regime gate fails (output is watermarked)");
    sub->add_flag("--oracle", o.oracle, "also write the closed-form comparison table");
    sub->add_option("--steps", o.steps, "split-step count for propagate")->check(CLI::PositiveNumber);
    sub->add_option("--points", o.points, "sample count of the experiment's main axis")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, exp] { chosen = exp; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    return run(*chosen, o);
  } catch (const slowlight::RegimeViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
