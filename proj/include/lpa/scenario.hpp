#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpa/count_core.hpp"
#include "lpa/engine.hpp"
#include "lpa/errors.hpp"
#include "lpa/parallel.hpp"
#include "lpa/rng.hpp"

namespace lpa {

enum class Family { constant, poisson, exponential };

struct Segment {
  std::size_t length = 0;
  double param = 0.0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Piecewise regime description for synthetic data.
struct ScenarioSpec {
  std::string label;
  Family family = Family::constant;
  std::vector<Segment> segments;

  std::size_t length() const noexcept {
    std::size_t n = 0;
    for (const auto& s : segments) {
      n += s.length;
    }
    return n;
  }

  void validate() const {
    if (segments.empty()) {
      throw argument_error("scenario '" + label + "' has no segments");
    }
    for (const auto& s : segments) {
      if (s.length == 0) {
        throw argument_error("scenario '" + label + "' has an empty segment");
      }
      if (family == Family::constant) {
        if (!(s.param >= 0.0) || std::floor(s.param) != s.param) {
          throw argument_error("constant scenario values must be non-negative integers");
        }
      } else if (!(s.param > 0.0) || !std::isfinite(s.param)) {
        throw argument_error("scenario '" + label + "' needs positive segment parameters");
      }
    }
  }

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// The six benchmark scenarios (a)-(f), each 300 periods long.
inline std::vector<ScenarioSpec> builtin_scenarios() {
  return {
      {"a", Family::constant, {{100, 1}, {100, 10}, {100, 20}}},
      {"b", Family::poisson, {{100, 1}, {100, 10}, {100, 20}}},
      {"c", Family::constant, {{199, 1}, {1, 10}, {100, 1}}},
      {"d", Family::constant, {{180, 10}, {20, 7}, {100, 10}}},
      {"e", Family::poisson, {{180, 5}, {20, 1}, {100, 5}}},
      {"f", Family::exponential, {{100, 0.1}, {100, 1}, {100, 10}}},
  };
}

inline ScenarioSpec builtin_scenario(const std::string& label) {
  for (auto& s : builtin_scenarios()) {
    if (s.label == label) {
      return s;
    }
  }
  throw argument_error("unknown scenario '" + label + "'; expected one of a-f");
}

namespace detail {

inline double unit_uniform(std::mt19937_64& eng) {
  return rng::unit_open_closed(eng());
}

/// Poisson draw by sequential products of uniforms. Rates above 16 are
/// split into chunks (a sum of independent Poissons is Poisson) so that
/// exp(-rate) never underflows.
inline std::int64_t poisson_draw(std::mt19937_64& eng, double rate) {
  constexpr double chunk = 16.0;
  std::int64_t total = 0;
  while (rate > 0.0) {
    const double r = std::min(rate, chunk);
    rate -= r;
    const double limit = std::exp(-r);
    double prod = unit_uniform(eng);
    while (prod > limit) {
      ++total;
      prod *= unit_uniform(eng);
    }
  }
  return total;
}

}  // namespace detail

/// Synthetic series for `spec`. Exponential draws (mean = param) are rounded
/// to the nearest integer so the count likelihood can consume them.
inline CountSeries generate(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 eng(seed);
  std::vector<CountSeries::value_type> values;
  values.reserve(spec.length());
  for (const auto& seg : spec.segments) {
    for (std::size_t i = 0; i < seg.length; ++i) {
      switch (spec.family) {
        case Family::constant:
          values.push_back(static_cast<CountSeries::value_type>(seg.param));
          break;
        case Family::poisson:
          values.push_back(detail::poisson_draw(eng, seg.param));
          break;
        case Family::exponential:
          values.push_back(static_cast<CountSeries::value_type>(
              std::round(-seg.param * std::log(detail::unit_uniform(eng)))));
          break;
      }
    }
  }
  return CountSeries(std::move(values));
}

struct Band {
  double low = 5.0;  ///< percentiles in [0, 100]
  double high = 95.0;

  void validate() const {
    if (!(low >= 0.0 && low <= high && high <= 100.0)) {
      throw argument_error("band percentiles must satisfy 0 <= low <= high <= 100");
    }
  }
};

/// Per-anchor aggregate across Monte-Carlo runs.
struct TracePoint {
  std::size_t anchor = 0;
  double window_mean = 0.0;
  double window_low = 0.0;
  double window_high = 0.0;
  double mle_mean = 0.0;
  double mle_low = 0.0;
  double mle_high = 0.0;
  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct MonteCarloTrace {
  std::string label;
  std::size_t runs = 0;
  Band band;
  std::vector<TracePoint> points;

  friend bool operator==(const MonteCarloTrace& a, const MonteCarloTrace& b) {
    return a.label == b.label && a.runs == b.runs && a.band.low == b.band.low &&
           a.band.high == b.band.high && a.points == b.points;
  }
};

/// Raw per-run results: windows[r][i] and mles[r][i] at anchors[i].
struct MonteCarloRuns {
  std::vector<std::size_t> anchors;
  std::vector<std::vector<std::size_t>> windows;
  std::vector<std::vector<double>> mles;
};

/// Seeds for run `r`: one stream for the data, one for the bootstrap.
inline std::uint64_t run_data_seed(std::uint64_t master, std::size_t r) {
  return rng::derive(master, {r, 0});
}
inline std::uint64_t run_bootstrap_seed(std::uint64_t master, std::size_t r) {
  return rng::derive(master, {r, 1});
}

/// Generates and fits `runs` independent series; the master seed is
/// bconfig.seed. Runs execute in parallel. `anchors_subset` restricts the
/// fitted anchors (default: every anchor with enough history).
inline MonteCarloRuns simulate_runs(const ScenarioSpec& spec, std::size_t runs,
                                    const GridConfig& gconfig, const BootstrapConfig& bconfig,
                                    const Execution& exec = {},
                                    const std::optional<std::vector<std::size_t>>& anchors_subset = std::nullopt) {
  if (runs < 1) {
    throw argument_error("at least one Monte-Carlo run is required");
  }
  spec.validate();
  MonteCarloRuns out;
  out.windows.resize(runs);
  out.mles.resize(runs);
  std::vector<std::vector<std::size_t>> anchors(runs);
  parallel_for(runs, exec, [&](std::size_t r) {
    const CountSeries series = generate(spec, run_data_seed(bconfig.seed, r));
    BootstrapConfig run_config = bconfig;
    run_config.seed = run_bootstrap_seed(bconfig.seed, r);
    const FitSet fits = fit_all_anchors(series, gconfig, run_config, anchors_subset, Execution{1});
    for (const auto& f : fits.fits) {
      anchors[r].push_back(f.anchor);
      out.windows[r].push_back(f.window_length);
      out.mles[r].push_back(f.mle);
    }
  });
  for (std::size_t r = 1; r < runs; ++r) {
    if (anchors[r] != anchors[0]) {
      throw invariant_violation("Monte-Carlo runs produced different anchor sets");
    }
  }
  out.anchors = std::move(anchors[0]);
  return out;
}

namespace detail {

/// Linear-interpolation percentile of an ascending sample, p in [0, 100].
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline void summarize(std::vector<double> values, const Band& band, double& mean, double& low,
                      double& high) {
  double total = 0.0;
  for (double v : values) {
    total += v;
  }
  mean = total / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  // A skewed sample can put the mean outside the percentile band; the band
  // is widened to contain it.
  low = std::min(percentile_sorted(values, band.low), mean);
  high = std::max(percentile_sorted(values, band.high), mean);
}

}  // namespace detail

inline MonteCarloTrace aggregate_runs(const MonteCarloRuns& runs, const Band& band,
                                      std::string label = {}) {
  band.validate();
  MonteCarloTrace trace;
  trace.label = std::move(label);
  trace.runs = runs.windows.size();
  trace.band = band;
  trace.points.resize(runs.anchors.size());
  std::vector<double> w(trace.runs);
  std::vector<double> m(trace.runs);
  for (std::size_t i = 0; i < runs.anchors.size(); ++i) {
    for (std::size_t r = 0; r < trace.runs; ++r) {
      w[r] = static_cast<double>(runs.windows[r][i]);
      m[r] = runs.mles[r][i];
    }
    TracePoint& p = trace.points[i];
    p.anchor = runs.anchors[i];
    detail::summarize(w, band, p.window_mean, p.window_low, p.window_high);
    detail::summarize(m, band, p.mle_mean, p.mle_low, p.mle_high);
  }
  return trace;
}

/// Monte-Carlo window and MLE trace for a scenario.
inline MonteCarloTrace run_monte_carlo(const ScenarioSpec& spec, std::size_t runs,
                                       const GridConfig& gconfig, const BootstrapConfig& bconfig,
                                       const Band& band = {}, const Execution& exec = {}) {
  band.validate();
  return aggregate_runs(simulate_runs(spec, runs, gconfig, bconfig, exec), band, spec.label);
}

}  // namespace lpa
