#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpa/count_core.hpp"
#include "lpa/engine.hpp"
#include "lpa/errors.hpp"
#include "lpa/parallel.hpp"

namespace lpa {

// Forecasts are constant extrapolations of a point estimate computed from
// the first `split` observations (indices 0 .. split - 1).

inline std::vector<double> lpa_forecast(const CountSeries& series, std::size_t split,
                                        std::size_t horizon, const GridConfig& gconfig,
                                        const BootstrapConfig& bconfig) {
  if (horizon < 1) {
    throw argument_error("forecast horizon must be at least 1");
  }
  if (split < 1 || split > series.size()) {
    throw index_error("split " + std::to_string(split) + " outside [1, " +
                      std::to_string(series.size()) + "]");
  }
  const AdaptiveFit fit = adaptive_fit(series, split - 1, gconfig, bconfig);
  return std::vector<double>(horizon, fit.mle);
}

inline std::vector<double> fixed_window_forecast(const CountSeries& series, std::size_t split,
                                                 std::size_t horizon, std::size_t window) {
  if (horizon < 1) {
    throw argument_error("forecast horizon must be at least 1");
  }
  if (window < 1) {
    throw argument_error("fixed window must be at least 1");
  }
  if (split > series.size()) {
    throw index_error("split " + std::to_string(split) + " beyond series of length " +
                      std::to_string(series.size()));
  }
  if (split < window) {
    throw insufficient_history("split " + std::to_string(split) + " leaves fewer than " +
                               std::to_string(window) + " observations");
  }
  return std::vector<double>(horizon, poisson_mle(series, trailing_interval(split - 1, window)));
}

/// Distribution of selected windows as a share of the history available at
/// each anchor.
struct WindowDistribution {
  static constexpr std::size_t bin_count = 20;

  std::vector<double> proportions;  ///< per fit, in (0, 1]
  std::vector<std::size_t> histogram;  ///< bin b covers (b / 20, (b + 1) / 20]
  std::size_t mode_bin = 0;
  double mode_proportion = 0.0;  ///< mean proportion inside the modal bin
  std::size_t final_history = 0;
  std::size_t mode_window = 0;  ///< mode_proportion scaled to final_history

  friend bool operator==(const WindowDistribution&, const WindowDistribution&) = default;
};

inline WindowDistribution window_distribution(std::span<const AdaptiveFit> fits,
                                              std::span<const std::size_t> history_per_anchor) {
  if (fits.empty()) {
    throw argument_error("window distribution needs at least one fit");
  }
  if (history_per_anchor.size() != fits.size()) {
    throw argument_error("history count does not match fit count");
  }
  WindowDistribution d;
  d.histogram.assign(WindowDistribution::bin_count, 0);
  std::vector<double> bin_total(WindowDistribution::bin_count, 0.0);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const std::size_t h = history_per_anchor[i];
    if (h == 0 || fits[i].window_length == 0 || fits[i].window_length > h) {
      throw argument_error("window length must lie in [1, history]");
    }
    const double p = static_cast<double>(fits[i].window_length) / static_cast<double>(h);
    d.proportions.push_back(p);
    const auto bin = std::min<std::size_t>(
        WindowDistribution::bin_count - 1,
        static_cast<std::size_t>(std::ceil(p * WindowDistribution::bin_count - 1e-12)) - 1);
    ++d.histogram[bin];
    bin_total[bin] += p;
  }
  // Ties go to the lowest bin.
  d.mode_bin = static_cast<std::size_t>(
      std::max_element(d.histogram.begin(), d.histogram.end()) - d.histogram.begin());
  d.mode_proportion = bin_total[d.mode_bin] / static_cast<double>(d.histogram[d.mode_bin]);
  d.final_history = history_per_anchor.back();
  const double months = std::round(d.mode_proportion * static_cast<double>(d.final_history));
  d.mode_window = std::clamp<std::size_t>(static_cast<std::size_t>(months), 1, d.final_history);
  return d;
}

/// Uses each fit's own history (anchor + 1).
inline WindowDistribution window_distribution(std::span<const AdaptiveFit> fits) {
  std::vector<std::size_t> history;
  history.reserve(fits.size());
  for (const auto& f : fits) {
    history.push_back(f.history);
  }
  return window_distribution(fits, history);
}

struct MethodForecast {
  std::string method;  ///< "lpa", "fixed(12)", ...
  std::size_t window = 0;  ///< 0 for the adaptive method
  std::vector<double> forecasts;
  double mse = 0.0;

  friend bool operator==(const MethodForecast&, const MethodForecast&) = default;
};

struct ForecastReport {
  std::size_t split = 0;
  std::size_t horizon = 0;
  std::vector<double> realized;
  std::size_t lpa_window = 0;  ///< adaptive window at the last training point
  std::size_t mode_window = 0;
  std::vector<MethodForecast> methods;
  std::vector<std::string> skipped;  ///< fixed windows longer than the training data

  const MethodForecast* find(const std::string& method) const {
    for (const auto& m : methods) {
      if (m.method == method) {
        return &m;
      }
    }
    return nullptr;
  }

  friend bool operator==(const ForecastReport&, const ForecastReport&) = default;
};

inline double mean_squared_error(std::span<const double> forecasts, std::span<const double> realized) {
  if (forecasts.size() != realized.size() || forecasts.empty()) {
    throw argument_error("forecast and realized sequences must be non-empty and equally long");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const double e = forecasts[i] - realized[i];
    total += e * e;
  }
  return total / static_cast<double>(forecasts.size());
}

inline std::string fixed_label(std::size_t window) {
  return "fixed(" + std::to_string(window) + ")";
}

/// Forecasts without a hold-out: the adaptive estimate plus fixed-window
/// baselines, all trained on [0, split).
struct PointForecast {
  std::string method;
  std::size_t window = 0;
  std::vector<double> forecasts;
  friend bool operator==(const PointForecast&, const PointForecast&) = default;
};

struct ForecastSet {
  std::size_t split = 0;
  std::size_t horizon = 0;
  std::size_t lpa_window = 0;
  std::vector<PointForecast> methods;
  std::vector<std::string> skipped;
  friend bool operator==(const ForecastSet&, const ForecastSet&) = default;
};

inline ForecastSet point_forecasts(const CountSeries& series, std::size_t split, std::size_t horizon,
                                   const GridConfig& gconfig, const BootstrapConfig& bconfig,
                                   std::span<const std::size_t> windows) {
  if (horizon < 1) {
    throw argument_error("forecast horizon must be at least 1");
  }
  if (split < 1 || split > series.size()) {
    throw index_error("split " + std::to_string(split) + " outside [1, " +
                      std::to_string(series.size()) + "]");
  }
  const AdaptiveFit fit = adaptive_fit(series, split - 1, gconfig, bconfig);
  ForecastSet out;
  out.split = split;
  out.horizon = horizon;
  out.lpa_window = fit.window_length;
  out.methods.push_back({"lpa", 0, std::vector<double>(horizon, fit.mle)});
  for (std::size_t w : windows) {
    if (w > split) {
      out.skipped.push_back(fixed_label(w));
      continue;
    }
    out.methods.push_back({fixed_label(w), w, fixed_window_forecast(series, split, horizon, w)});
  }
  return out;
}

/// Pseudo-out-of-sample comparison: train on [0, split), score the next
/// `horizon` observations. Methods: lpa, fixed(12), fixed(36), fixed(w)
/// with w the modal adaptive window on the training data, then any extras.
inline ForecastReport evaluate(const CountSeries& series, std::size_t split, std::size_t horizon,
                               const GridConfig& gconfig, const BootstrapConfig& bconfig,
                               std::span<const std::size_t> extra_windows = {},
                               const Execution& exec = {}) {
  if (horizon < 1) {
    throw argument_error("forecast horizon must be at least 1");
  }
  if (split < 1 || split + horizon > series.size()) {
    throw index_error("split " + std::to_string(split) + " with horizon " +
                      std::to_string(horizon) + " overruns series of length " +
                      std::to_string(series.size()));
  }
  const CountSeries training = series.head(split);
  const FitSet fits = fit_all_anchors(training, gconfig, bconfig, std::nullopt, exec);
  if (fits.fits.empty() || fits.fits.back().anchor != split - 1) {
    throw insufficient_history("training segment of " + std::to_string(split) +
                               " observations is too short for an adaptive fit");
  }
  const AdaptiveFit& last = fits.fits.back();
  const WindowDistribution dist = window_distribution(fits.fits);

  ForecastReport report;
  report.split = split;
  report.horizon = horizon;
  for (std::size_t t = split; t < split + horizon; ++t) {
    report.realized.push_back(static_cast<double>(series[t]));
  }
  report.lpa_window = last.window_length;
  report.mode_window = dist.mode_window;

  MethodForecast adaptive{"lpa", 0, std::vector<double>(horizon, last.mle), 0.0};
  adaptive.mse = mean_squared_error(adaptive.forecasts, report.realized);
  report.methods.push_back(std::move(adaptive));

  auto add_fixed = [&](const std::string& label, std::size_t window) {
    if (window > split) {
      report.skipped.push_back(label);
      return;
    }
    MethodForecast m{label, window, fixed_window_forecast(series, split, horizon, window), 0.0};
    m.mse = mean_squared_error(m.forecasts, report.realized);
    report.methods.push_back(std::move(m));
  };
  add_fixed(fixed_label(12), 12);
  add_fixed(fixed_label(36), 36);
  add_fixed("fixed(w)", dist.mode_window);
  for (std::size_t w : extra_windows) {
    if (w < 1) {
      throw argument_error("fixed window must be at least 1");
    }
    add_fixed(fixed_label(w), w);
  }
  return report;
}

}  // namespace lpa
