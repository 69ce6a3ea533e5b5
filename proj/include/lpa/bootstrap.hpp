#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpa/count_core.hpp"
#include "lpa/errors.hpp"
#include "lpa/rng.hpp"

namespace lpa {

enum class WeightFamily {
  exponential,  ///< Exp(1): mean 1, variance 1, strictly positive
  gaussian,     ///< 1 + N(0, 1): mean 1, variance 1, may be negative
};

struct BootstrapConfig {
  std::size_t draws = 1000;
  double alpha = 0.05;
  WeightFamily weight_family = WeightFamily::exponential;
  std::uint64_t seed = 20210101;

  void validate() const {
    if (draws < 1) {
      throw argument_error("bootstrap draws must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw argument_error("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
  }
};

struct BootstrapResult {
  std::vector<double> statistics;  ///< ascending
  double threshold = 0.0;
  std::size_t redraws = 0;  ///< weight vectors rejected for a degenerate side
};

/// Fills `out` with the weights of replication (draw_index, sub_index).
/// Element i depends only on (seed, draw_index, sub_index, i).
inline void fill_weights(const BootstrapConfig& config, std::uint64_t draw_index,
                         std::uint64_t sub_index, std::span<double> out) {
  const std::uint64_t key = rng::derive(config.seed, {draw_index, sub_index});
  switch (config.weight_family) {
    case WeightFamily::exponential:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = rng::exponential_at(key, i);
      }
      break;
    case WeightFamily::gaussian:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 1.0 + rng::normal_at(key, i);
      }
      break;
  }
}

/// I.i.d. multiplier weights with mean 1 and variance 1.
inline std::vector<double> draw_weights(const BootstrapConfig& config, std::size_t n,
                                        std::uint64_t draw_index, std::uint64_t sub_index = 0) {
  std::vector<double> w(n);
  fill_weights(config, draw_index, sub_index, w);
  return w;
}

/// Weighted count sum and weight sum of one segment.
struct WeightedSums {
  double sum = 0.0;
  double weight = 0.0;
};

inline WeightedSums weighted_sums(const CountSeries& series, const Interval& interval,
                                  std::span<const double> weights) {
  check_interval(series, interval);
  if (weights.size() != interval.length()) {
    throw argument_error("weight count " + std::to_string(weights.size()) +
                         " does not match interval length " + std::to_string(interval.length()));
  }
  WeightedSums s;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    s.sum += static_cast<double>(series[interval.start + i]) * weights[i];
    s.weight += weights[i];
  }
  return s;
}

/// Bootstrap MLE: sum(Y w) / sum(w).
inline double weighted_mle(const CountSeries& series, const Interval& interval,
                           std::span<const double> weights) {
  const WeightedSums s = weighted_sums(series, interval, weights);
  if (!(s.weight > 0.0)) {
    throw degenerate_weights("weights over [" + std::to_string(interval.start) + ", " +
                             std::to_string(interval.end) + "] sum to a non-positive value");
  }
  return s.sum / s.weight;
}

namespace detail {

inline double penalized_objective(const WeightedSums& a, const WeightedSums& b, double delta,
                                  double theta) noexcept {
  return poisson_kernel(a.sum, a.weight, theta) + poisson_kernel(b.sum, b.weight, theta + delta);
}

inline double golden_section_max(const WeightedSums& a, const WeightedSums& b, double delta,
                                 double lo, double hi) {
  constexpr double inv_phi = 0.61803398874989484820;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = penalized_objective(a, b, delta, x1);
  double f2 = penalized_objective(a, b, delta, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = penalized_objective(a, b, delta, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = penalized_objective(a, b, delta, x1);
    }
  }
  return std::max({f1, f2, penalized_objective(a, b, delta, lo),
                   penalized_objective(a, b, delta, hi)});
}

}  // namespace detail

/// sup over theta > max(0, -delta) of L_A(theta) + L_B(theta + delta), each
/// a weighted factorial-free Poisson likelihood.
///
/// The objective is concave, so the supremum is the larger root of
///   W theta^2 + (W delta - S_A - S_B) theta - S_A delta = 0,   W = W_A + W_B,
/// when that root is feasible, and the lower boundary otherwise (which can
/// only happen when the segment touching the boundary has zero count sum).
inline double penalized_sup(const WeightedSums& a, const WeightedSums& b, double delta) {
  const double lo = std::max(0.0, -delta);
  const double w = a.weight + b.weight;
  const double s = a.sum + b.sum;
  if (s == 0.0) {
    return detail::penalized_objective(a, b, delta, lo);
  }
  const double bq = w * delta - s;
  const double cq = -a.sum * delta;
  const double disc = bq * bq - 4.0 * w * cq;
  double root = std::nan("");
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    root = bq <= 0.0 ? (-bq + sq) / (2.0 * w) : (2.0 * cq) / (-bq - sq);
  }
  if (std::isfinite(root) && root > lo) {
    return detail::penalized_objective(a, b, delta, root);
  }
  const bool boundary_finite = (lo == 0.0 && a.sum == 0.0) || (lo == -delta && b.sum == 0.0);
  if (std::isfinite(root) && boundary_finite) {
    return detail::penalized_objective(a, b, delta, lo);
  }
  // Rounding pushed the root out of the domain; the maximiser lies in
  // [lo, lo + S / W] because the derivative is non-positive past that point.
  return detail::golden_section_max(a, b, delta, lo, lo + s / w);
}

/// Interval-level overload: A and B must be adjacent with A before B.
inline double penalized_sup(const CountSeries& series, const Interval& a, const Interval& b,
                            std::span<const double> weights_a, std::span<const double> weights_b,
                            double delta) {
  if (a.end + 1 != b.start) {
    throw argument_error("penalized_sup requires adjacent segments A then B");
  }
  return penalized_sup(weighted_sums(series, a, weights_a), weighted_sums(series, b, weights_b),
                       delta);
}

namespace detail {

/// Data shared by every bootstrap replication of one (interval, candidates)
/// test: values over the interval and the unweighted penalties.
struct SplitPlan {
  Interval whole;
  std::vector<std::size_t> offsets;  ///< tau - whole.start, per candidate
  std::vector<double> deltas;        ///< unweighted theta_B - theta_A, per candidate
  std::vector<double> values;        ///< counts over whole

  SplitPlan(const CountSeries& series, const Interval& w, std::span<const std::size_t> candidates)
      : whole(w) {
    check_interval(series, whole);
    if (candidates.empty()) {
      throw argument_error("bootstrap requires at least one candidate breakpoint");
    }
    values.reserve(whole.length());
    for (std::size_t t = whole.start; t <= whole.end; ++t) {
      values.push_back(static_cast<double>(series[t]));
    }
    offsets.reserve(candidates.size());
    deltas.reserve(candidates.size());
    for (std::size_t tau : candidates) {
      if (tau < whole.start || tau >= whole.end) {
        throw split_error("split point " + std::to_string(tau) + " leaves an empty side in [" +
                          std::to_string(whole.start) + ", " + std::to_string(whole.end) + "]");
      }
      offsets.push_back(tau - whole.start);
      const double theta_a = static_cast<double>(series.sum(whole.start, tau)) /
                             static_cast<double>(tau - whole.start + 1);
      const double theta_b = static_cast<double>(series.sum(tau + 1, whole.end)) /
                             static_cast<double>(whole.end - tau);
      deltas.push_back(theta_b - theta_a);
    }
  }
};

/// Scratch buffers reused across replications.
struct BootstrapScratch {
  std::vector<double> weights;
  std::vector<double> prefix_sum;
  std::vector<double> prefix_weight;
};

/// Max over candidates of the penalised bootstrap statistic for one weight
/// vector. Returns false when a side has a degenerate weighted fit.
inline bool bootstrap_max(const SplitPlan& plan, std::span<const double> weights,
                          BootstrapScratch& scratch, double& out) {
  const std::size_t n = plan.values.size();
  scratch.prefix_sum.resize(n + 1);
  scratch.prefix_weight.resize(n + 1);
  scratch.prefix_sum[0] = 0.0;
  scratch.prefix_weight[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.prefix_sum[i + 1] = scratch.prefix_sum[i] + plan.values[i] * weights[i];
    scratch.prefix_weight[i + 1] = scratch.prefix_weight[i] + weights[i];
  }
  double best = 0.0;
  for (std::size_t j = 0; j < plan.offsets.size(); ++j) {
    const std::size_t cut = plan.offsets[j] + 1;
    const WeightedSums a{scratch.prefix_sum[cut], scratch.prefix_weight[cut]};
    const WeightedSums b{scratch.prefix_sum[n] - a.sum, scratch.prefix_weight[n] - a.weight};
    if (!(a.weight > 0.0 && b.weight > 0.0 && a.sum >= 0.0 && b.sum >= 0.0)) {
      return false;
    }
    const double value = poisson_kernel_at_mle(a.sum, a.weight) +
                         poisson_kernel_at_mle(b.sum, b.weight) -
                         penalized_sup(a, b, plan.deltas[j]);
    best = std::max(best, value);
  }
  out = best;
  return true;
}

inline constexpr std::uint64_t max_redraws_per_draw = 1000;

}  // namespace detail

/// Penalised multiplier-bootstrap statistic for one weight vector covering
/// `whole`. The penalty for each tau comes from the unweighted data.
inline double bootstrap_statistic(const CountSeries& series, const Interval& whole,
                                  std::span<const std::size_t> candidates,
                                  std::span<const double> weights) {
  const detail::SplitPlan plan(series, whole, candidates);
  if (weights.size() != whole.length()) {
    throw argument_error("weight count " + std::to_string(weights.size()) +
                         " does not match interval length " + std::to_string(whole.length()));
  }
  detail::BootstrapScratch scratch;
  double value = 0.0;
  if (!detail::bootstrap_max(plan, weights, scratch, value)) {
    throw degenerate_weights("weights give a non-positive weight sum on one side of a split");
  }
  return value;
}

/// Order statistic ceil((1 - alpha) * B) (1-based) of an ascending sample.
inline double upper_quantile(std::span<const double> sorted, double alpha) {
  if (sorted.empty()) {
    throw argument_error("quantile of an empty sample");
  }
  const double b = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

/// Bootstrap null distribution of the sup statistic on (whole, candidates)
/// and its (1 - alpha) critical value. Reject homogeneity when the observed
/// sup statistic strictly exceeds `threshold`.
inline BootstrapResult critical_threshold(const CountSeries& series, const Interval& whole,
                                          std::span<const std::size_t> candidates,
                                          const BootstrapConfig& config) {
  config.validate();
  const detail::SplitPlan plan(series, whole, candidates);
  detail::BootstrapScratch scratch;
  scratch.weights.resize(whole.length());

  BootstrapResult result;
  result.statistics.resize(config.draws);
  for (std::size_t d = 0; d < config.draws; ++d) {
    for (std::uint64_t sub = 0;; ++sub) {
      if (sub == detail::max_redraws_per_draw) {
        throw degenerate_weights("could not draw a non-degenerate weight vector for draw " +
                                 std::to_string(d));
      }
      fill_weights(config, d, sub, scratch.weights);
      if (detail::bootstrap_max(plan, scratch.weights, scratch, result.statistics[d])) {
        break;
      }
      ++result.redraws;
    }
  }
  std::sort(result.statistics.begin(), result.statistics.end());
  result.threshold = upper_quantile(result.statistics, config.alpha);
  return result;
}

}  // namespace lpa
