#pragma once

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpa/lpa.hpp"

namespace lpa::cli {

enum exit_code : int { ok = 0, user_error = 1, internal_error = 2 };

namespace detail {

struct Options {
  RunConfig config;
  std::string rounding = "floor";
  std::string weights = "exponential";
  std::optional<std::string> format;
  std::vector<double> band{5.0, 95.0};
  unsigned threads = 0;
};

inline void add_model_options(CLI::App& cmd, Options& o) {
  auto& g = o.config.grid;
  auto& b = o.config.bootstrap;
  cmd.add_option("--n0", g.n0, "Minimal homogeneous window")->capture_default_str();
  cmd.add_option("--c", g.c, "Geometric multiplier of the window grid")->capture_default_str();
  cmd.add_option("--rounding", o.rounding, "Grid rounding: floor or ceiling")
      ->check(CLI::IsMember({"floor", "ceiling"}))
      ->capture_default_str();
  cmd.add_option("--grid-step", g.step, "Arithmetic grid step (0 = geometric grid)")
      ->capture_default_str();
  cmd.add_option("--alpha", b.alpha, "Test level")->capture_default_str();
  cmd.add_option("--draws", b.draws, "Bootstrap replications per test")->capture_default_str();
  cmd.add_option("--weights", o.weights, "Bootstrap weights: exponential or gaussian")
      ->check(CLI::IsMember({"exponential", "gaussian"}))
      ->capture_default_str();
  cmd.add_option("--seed", b.seed, "Master random seed")->capture_default_str();
  cmd.add_option("--output,-o", o.config.output, "Output path (default: standard output)");
  cmd.add_option("--format", o.format, "Output format: csv or json (default: from extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores); does not affect results")
      ->capture_default_str();
}

inline std::size_t resolve_split(std::int64_t split, std::size_t n) {
  const std::int64_t len = static_cast<std::int64_t>(n);
  const std::int64_t s = split < 0 ? len + split : split;
  if (s < 1 || s > len) {
    throw argument_error("split " + std::to_string(split) + " does not leave at least one "
                         "training observation in a series of length " + std::to_string(n));
  }
  return static_cast<std::size_t>(s);
}

inline void finalize(Options& o) {
  o.config.grid.rounding = o.rounding == "ceiling" ? Rounding::ceiling : Rounding::floor;
  o.config.bootstrap.weight_family =
      o.weights == "gaussian" ? WeightFamily::gaussian : WeightFamily::exponential;
  if (o.format) {
    o.config.format = *o.format == "json" ? OutputFormat::json : OutputFormat::csv;
  } else if (o.config.output && o.config.output->size() >= 5 &&
             o.config.output->ends_with(".json")) {
    o.config.format = OutputFormat::json;
  }
  o.config.band = Band{o.band.at(0), o.band.at(1)};
  o.config.grid.validate();
  o.config.bootstrap.validate();
  o.config.band.validate();
}

inline void dispatch(Options& o, std::ostream& out) {
  const RunConfig& c = o.config;
  const Execution exec{o.threads};
  if (c.command == "fit") {
    const CountSeries series = parse_series(*c.input);
    emit_results(c, fit_all_anchors(series, c.grid, c.bootstrap, std::nullopt, exec), out);
  } else if (c.command == "simulate") {
    const ScenarioSpec spec = c.spec_path ? parse_scenario_spec(*c.spec_path)
                                          : builtin_scenario(*c.scenario);
    emit_results(c, run_monte_carlo(spec, c.runs, c.grid, c.bootstrap, c.band, exec), out);
  } else if (c.command == "forecast") {
    const CountSeries series = parse_series(*c.input);
    const std::size_t split =
        c.split ? resolve_split(*c.split, series.size()) : series.size();
    std::vector<std::size_t> windows{12, 36};
    windows.insert(windows.end(), c.windows.begin(), c.windows.end());
    emit_results(c, point_forecasts(series, split, c.horizon, c.grid, c.bootstrap, windows), out);
  } else if (c.command == "evaluate") {
    const CountSeries series = parse_series(*c.input);
    const std::int64_t raw = c.split ? *c.split : -static_cast<std::int64_t>(c.horizon);
    const std::size_t split = resolve_split(raw, series.size());
    emit_results(c, evaluate(series, split, c.horizon, c.grid, c.bootstrap, c.windows, exec), out);
  } else {
    throw invariant_violation("unhandled command '" + c.command + "'");
  }
}

}  // namespace detail

/// Full command-line entry point. Exit 0 on success, 1 on user errors
/// (usage, parse, validation, infeasible requests), 2 on internal faults.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  detail::Options o;
  CLI::App app{"Adaptive homogeneous windows and forecasts for count time series"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Adaptive window and MLE at every anchor");
  fit->add_option("--input,-i", o.config.input, "Series CSV (header period,count)")->required();
  detail::add_model_options(*fit, o);

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo window/MLE trace for a scenario");
  auto* scen = sim->add_option("--scenario", o.config.scenario, "Built-in scenario a-f")
                   ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f"}));
  auto* spec = sim->add_option("--spec", o.config.spec_path, "Custom scenario spec (JSON)");
  scen->excludes(spec);
  sim->add_option("--runs", o.config.runs, "Monte-Carlo runs")->capture_default_str();
  sim->add_option("--band", o.band, "Percentile band low,high")
      ->delimiter(',')
      ->expected(2)
      ->default_str("5,95");
  detail::add_model_options(*sim, o);

  auto* fc = app.add_subcommand("forecast", "Adaptive and fixed-window point forecasts");
  fc->add_option("--input,-i", o.config.input, "Series CSV (header period,count)")->required();
  fc->add_option("--split", o.config.split,
                 "Training length; negative counts from the end (default: whole series)");
  fc->add_option("--horizon", o.config.horizon, "Forecast steps")->capture_default_str();
  fc->add_option("--windows", o.config.windows, "Extra fixed windows besides 12 and 36")
      ->delimiter(',');
  detail::add_model_options(*fc, o);

  auto* ev = app.add_subcommand("evaluate", "Hold-out MSE of adaptive vs fixed-window forecasts");
  ev->add_option("--input,-i", o.config.input, "Series CSV (header period,count)")->required();
  ev->add_option("--split", o.config.split,
                 "Training length; negative counts from the end (default: -horizon)");
  ev->add_option("--horizon", o.config.horizon, "Hold-out steps")->capture_default_str();
  ev->add_option("--windows", o.config.windows, "Extra fixed windows besides 12, 36 and w")
      ->delimiter(',');
  detail::add_model_options(*ev, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::user_error;
  }

  for (auto* sub : {fit, sim, fc, ev}) {
    if (sub->parsed()) {
      o.config.command = sub->get_name();
    }
  }
  try {
    if (o.config.command == "simulate" && !o.config.scenario && !o.config.spec_path) {
      throw argument_error("simulate needs --scenario or --spec");
    }
    detail::finalize(o);
    detail::dispatch(o, out);
  } catch (const invariant_violation& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code::internal_error;
  } catch (const lpa::error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::user_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code::internal_error;
  }
  return exit_code::ok;
}

}  // namespace lpa::cli
