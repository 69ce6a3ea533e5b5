#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpa/bootstrap.hpp"
#include "lpa/count_core.hpp"
#include "lpa/errors.hpp"
#include "lpa/parallel.hpp"
#include "lpa/rng.hpp"

namespace lpa {

enum class Rounding { floor, ceiling };

/// Candidate window lengths. Geometric n_k = round(n0 * c^k) by default;
/// a non-zero `step` switches to the arithmetic grid n0, n0 + step, ...
struct GridConfig {
  std::size_t n0 = 5;
  double c = 1.35;
  Rounding rounding = Rounding::floor;
  std::size_t step = 0;

  void validate() const {
    if (n0 < 2) {
      throw argument_error("minimal window n0 must be at least 2, got " + std::to_string(n0));
    }
    if (step == 0 && !(c > 1.0)) {
      throw argument_error("geometric multiplier c must exceed 1, got " + std::to_string(c));
    }
  }
};

/// Nested window lengths n_0 < n_1 < ... < n_K; n_K is the available history.
struct IntervalGrid {
  std::vector<std::size_t> lengths;

  /// Index of the last (full-history) interval.
  std::size_t K() const noexcept { return lengths.size() - 1; }
  friend bool operator==(const IntervalGrid&, const IntervalGrid&) = default;
};

namespace detail {

inline std::size_t round_grid_length(double x, Rounding rounding) {
  // Absorb representation error so that e.g. 5 * 2^3 is not floored to 39.
  const double tol = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<std::size_t>(rounding == Rounding::floor ? std::floor(x + tol)
                                                              : std::ceil(x - tol));
}

inline constexpr std::size_t max_grid_iterations = 10'000'000;

}  // namespace detail

inline IntervalGrid build_grid(const GridConfig& config, std::size_t history) {
  config.validate();
  if (history < config.n0) {
    throw insufficient_history("history of " + std::to_string(history) +
                               " observations is shorter than the minimal window " +
                               std::to_string(config.n0));
  }
  IntervalGrid grid;
  grid.lengths.push_back(config.n0);
  for (std::size_t k = 1; grid.lengths.back() < history; ++k) {
    if (k > detail::max_grid_iterations) {
      throw argument_error("grid does not grow; increase c");
    }
    std::size_t next = 0;
    if (config.step != 0) {
      next = config.n0 + k * config.step;
    } else {
      const double x = static_cast<double>(config.n0) * std::pow(config.c, static_cast<double>(k));
      next = std::isfinite(x) ? detail::round_grid_length(x, config.rounding) : history;
    }
    if (next >= history) {
      grid.lengths.push_back(history);
    } else if (next > grid.lengths.back()) {
      grid.lengths.push_back(next);
    }
  }
  return grid;
}

/// Smallest history for which at least one homogeneity test exists
/// (the grid must contain I_0, I_1 and an enclosing I_2).
inline std::size_t min_fit_history(const GridConfig& config) {
  config.validate();
  const IntervalGrid probe = build_grid(config, std::max<std::size_t>(config.n0 + 1, 1 << 20));
  return probe.lengths[1] + 1;
}

/// Outcome of testing I_k against a change point in J_k = I_k \ I_{k-1}.
struct IntervalTest {
  std::size_t k = 0;
  std::size_t length = 0;       ///< n_k
  std::size_t span_length = 0;  ///< n_{k+1}
  std::size_t candidates = 0;   ///< |J_k| after dropping degenerate splits
  double max_statistic = 0.0;
  std::size_t tau = 0;  ///< argmax breakpoint (last index of the left side)
  double threshold = 0.0;
  bool accepted = true;
  bool auto_accepted = false;  ///< no valid candidate; accepted without a test
  std::size_t redraws = 0;

  friend bool operator==(const IntervalTest&, const IntervalTest&) = default;
};

/// Homogeneity test of I_k at `anchor`. The statistic for each tau in J_k
/// splits the enclosing span I_{k+1} into [start, tau] and (tau, anchor].
/// Bootstrap draws are keyed by (bconfig.seed, anchor, k).
inline IntervalTest test_interval_k(const CountSeries& series, std::size_t anchor,
                                    const IntervalGrid& grid, std::size_t k,
                                    const BootstrapConfig& bconfig) {
  if (anchor >= series.size()) {
    throw index_error("anchor " + std::to_string(anchor) + " beyond series of length " +
                      std::to_string(series.size()));
  }
  if (k < 1 || k + 1 > grid.K()) {
    throw range_error("interval index " + std::to_string(k) + " is not testable; valid range is [1, " +
                      std::to_string(grid.K() == 0 ? 0 : grid.K() - 1) + "]");
  }
  const Interval span = trailing_interval(anchor, grid.lengths[k + 1]);

  // J_k = I_k \ I_{k-1}, as split points in chronological order.
  const std::size_t first = anchor + 1 - grid.lengths[k];
  const std::size_t last = anchor - grid.lengths[k - 1];
  std::vector<std::size_t> candidates;
  for (std::size_t tau = first; tau <= last; ++tau) {
    if (tau >= span.start && tau < span.end) {
      candidates.push_back(tau);
    }
  }

  IntervalTest out;
  out.k = k;
  out.length = grid.lengths[k];
  out.span_length = grid.lengths[k + 1];
  out.candidates = candidates.size();
  if (candidates.empty()) {
    out.auto_accepted = true;
    return out;
  }
  const SupLrResult observed = sup_lr(series, span, candidates);
  BootstrapConfig test_config = bconfig;
  test_config.seed = rng::derive(bconfig.seed, {anchor, k});
  const BootstrapResult boot = critical_threshold(series, span, candidates, test_config);

  out.max_statistic = observed.best.statistic;
  out.tau = observed.best.tau;
  out.threshold = boot.threshold;
  out.accepted = !(observed.best.statistic > boot.threshold);
  out.redraws = boot.redraws;
  return out;
}

/// Adaptive homogeneous window at one anchor.
struct AdaptiveFit {
  std::size_t anchor = 0;
  std::size_t history = 0;  ///< observations up to and including the anchor
  std::size_t window_length = 0;
  double mle = 0.0;
  bool accepted_by_exhaustion = false;  ///< every test accepted; window = full history
  std::vector<IntervalTest> tested;

  friend bool operator==(const AdaptiveFit&, const AdaptiveFit&) = default;
};

/// Sequential testing I_1, I_2, ... at `anchor`, stopping at the first
/// rejection. I_0 is taken as homogeneous.
inline AdaptiveFit adaptive_fit(const CountSeries& series, std::size_t anchor,
                                const GridConfig& gconfig, const BootstrapConfig& bconfig) {
  bconfig.validate();
  if (anchor >= series.size()) {
    throw index_error("anchor " + std::to_string(anchor) + " beyond series of length " +
                      std::to_string(series.size()));
  }
  const std::size_t history = anchor + 1;
  const IntervalGrid grid = build_grid(gconfig, history);
  if (grid.K() < 2) {
    throw insufficient_history("anchor " + std::to_string(anchor) + " has " +
                               std::to_string(history) + " observations; at least " +
                               std::to_string(min_fit_history(gconfig)) +
                               " are needed for one homogeneity test");
  }

  AdaptiveFit fit;
  fit.anchor = anchor;
  fit.history = history;
  std::size_t accepted_k = grid.K();
  for (std::size_t k = 1; k + 1 <= grid.K(); ++k) {
    fit.tested.push_back(test_interval_k(series, anchor, grid, k, bconfig));
    if (!fit.tested.back().accepted) {
      accepted_k = k - 1;
      break;
    }
  }
  fit.accepted_by_exhaustion = accepted_k == grid.K();
  fit.window_length = grid.lengths[accepted_k];
  fit.mle = poisson_mle(series, trailing_interval(anchor, fit.window_length));
  return fit;
}

struct FitSet {
  std::vector<AdaptiveFit> fits;     ///< in anchor order
  std::vector<std::size_t> skipped;  ///< anchors with too little history
  friend bool operator==(const FitSet&, const FitSet&) = default;
};

/// Adaptive fits for every anchor (default: all anchors with enough history
/// for one test). Anchors are independent and processed in parallel.
inline FitSet fit_all_anchors(const CountSeries& series, const GridConfig& gconfig,
                              const BootstrapConfig& bconfig,
                              std::optional<std::vector<std::size_t>> anchors = std::nullopt,
                              const Execution& exec = {}) {
  gconfig.validate();
  bconfig.validate();
  const std::size_t min_history = min_fit_history(gconfig);
  std::vector<std::size_t> requested;
  if (anchors) {
    requested = *anchors;
  } else {
    requested.reserve(series.size());
    for (std::size_t a = 0; a < series.size(); ++a) {
      requested.push_back(a);
    }
  }

  FitSet out;
  std::vector<std::size_t> work;
  for (std::size_t a : requested) {
    if (a >= series.size()) {
      throw index_error("anchor " + std::to_string(a) + " beyond series of length " +
                        std::to_string(series.size()));
    }
    if (a + 1 < min_history) {
      out.skipped.push_back(a);
    } else {
      work.push_back(a);
    }
  }
  out.fits.resize(work.size());
  parallel_for(work.size(), exec, [&](std::size_t i) {
    out.fits[i] = adaptive_fit(series, work[i], gconfig, bconfig);
  });
  return out;
}

}  // namespace lpa
