#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpa/errors.hpp"

namespace lpa {

/// Ordered non-negative integer observations, one per period, with optional
/// opaque period labels. Keeps exact integer prefix sums so that every
/// interval sum is O(1) and independent of summation order.
class CountSeries {
 public:
  using value_type = std::int64_t;

  explicit CountSeries(std::vector<value_type> values,
                       std::optional<std::vector<std::string>> labels = std::nullopt)
      : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.empty()) {
      throw argument_error("count series must contain at least one observation");
    }
    if (labels_ && labels_->size() != values_.size()) {
      throw argument_error("label count " + std::to_string(labels_->size()) +
                           " does not match value count " + std::to_string(values_.size()));
    }
    prefix_.resize(values_.size() + 1, 0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < 0) {
        throw validation_error("negative count " + std::to_string(values_[i]) +
                               " at index " + std::to_string(i));
      }
      prefix_[i + 1] = prefix_[i] + values_[i];
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const value_type> values() const noexcept { return values_; }
  value_type operator[](std::size_t i) const { return values_[i]; }
  const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }

  /// Sum of values over the inclusive index range [first, last].
  value_type sum(std::size_t first, std::size_t last) const {
    return prefix_[last + 1] - prefix_[first];
  }

  /// Copy of the first `n` observations (labels truncated alongside).
  CountSeries head(std::size_t n) const {
    if (n == 0 || n > size()) {
      throw index_error("head length " + std::to_string(n) + " outside [1, " +
                        std::to_string(size()) + "]");
    }
    std::vector<value_type> v(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n));
    std::optional<std::vector<std::string>> l;
    if (labels_) {
      l.emplace(labels_->begin(), labels_->begin() + static_cast<std::ptrdiff_t>(n));
    }
    return CountSeries(std::move(v), std::move(l));
  }

  friend bool operator==(const CountSeries& a, const CountSeries& b) {
    return a.values_ == b.values_ && a.labels_ == b.labels_;
  }

 private:
  std::vector<value_type> values_;
  std::optional<std::vector<std::string>> labels_;
  std::vector<value_type> prefix_;
};

/// Inclusive index range [start, end].
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start + 1; }
  bool contains(std::size_t i) const noexcept { return start <= i && i <= end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Interval of `length` observations ending at `anchor`.
inline Interval trailing_interval(std::size_t anchor, std::size_t length) {
  if (length == 0 || length > anchor + 1) {
    throw index_error("trailing interval of length " + std::to_string(length) +
                      " does not fit before anchor " + std::to_string(anchor));
  }
  return Interval{anchor + 1 - length, anchor};
}

inline void check_interval(const CountSeries& series, const Interval& interval) {
  if (interval.start > interval.end || interval.end >= series.size()) {
    throw index_error("interval [" + std::to_string(interval.start) + ", " +
                      std::to_string(interval.end) + "] invalid for series of length " +
                      std::to_string(series.size()));
  }
}

/// A candidate breakpoint and its likelihood-ratio value. `tau` is the last
/// index of the left segment.
struct SplitStatistic {
  std::size_t tau = 0;
  double statistic = 0.0;
  friend bool operator==(const SplitStatistic&, const SplitStatistic&) = default;
};

namespace detail {

/// Factorial-free Poisson log-likelihood from sufficient statistics:
/// sum * log(theta) - n * theta, with 0 * log 0 = 0.
inline double poisson_kernel(double sum, double n, double theta) noexcept {
  if (sum == 0.0) {
    return -n * theta;
  }
  if (theta == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return sum * std::log(theta) - n * theta;
}

/// Kernel evaluated at the segment MLE sum / n.
inline double poisson_kernel_at_mle(double sum, double n) noexcept {
  return poisson_kernel(sum, n, sum / n);
}

/// LR statistic of a split from the segment sufficient statistics, written
/// as S_A log(theta_A / theta) + S_B log(theta_B / theta). The linear terms
/// cancel exactly, so a homogeneous split gives exactly zero.
inline double split_statistic(double sum_a, double n_a, double sum_b, double n_b) noexcept {
  const double sum = sum_a + sum_b;
  const double n = n_a + n_b;
  double value = 0.0;
  if (sum_a > 0.0) {
    value += sum_a * std::log((sum_a * n) / (n_a * sum));
  }
  if (sum_b > 0.0) {
    value += sum_b * std::log((sum_b * n) / (n_b * sum));
  }
  return value > 0.0 ? value : 0.0;
}

}  // namespace detail

/// Sample mean over the interval.
inline double poisson_mle(const CountSeries& series, const Interval& interval) {
  check_interval(series, interval);
  return static_cast<double>(series.sum(interval.start, interval.end)) /
         static_cast<double>(interval.length());
}

/// Poisson log-likelihood over `interval` at rate `theta`. The factorial
/// term is a theta-independent constant and is omitted unless requested.
inline double log_likelihood(const CountSeries& series, const Interval& interval, double theta,
                             bool include_factorial = false) {
  check_interval(series, interval);
  if (!(theta >= 0.0)) {
    throw domain_error("Poisson rate must be non-negative, got " + std::to_string(theta));
  }
  double value = detail::poisson_kernel(static_cast<double>(series.sum(interval.start, interval.end)),
                                        static_cast<double>(interval.length()), theta);
  if (include_factorial) {
    for (std::size_t t = interval.start; t <= interval.end; ++t) {
      value -= std::lgamma(static_cast<double>(series[t]) + 1.0);
    }
  }
  return value;
}

/// LR statistic for splitting `whole` into A = [whole.start, tau] and
/// B = (tau, whole.end].
inline SplitStatistic lr_split_statistic(const CountSeries& series, const Interval& whole,
                                         std::size_t tau) {
  check_interval(series, whole);
  if (tau < whole.start || tau >= whole.end) {
    throw split_error("split point " + std::to_string(tau) + " leaves an empty side in [" +
                      std::to_string(whole.start) + ", " + std::to_string(whole.end) + "]");
  }
  const double sum_a = static_cast<double>(series.sum(whole.start, tau));
  const double sum_b = static_cast<double>(series.sum(tau + 1, whole.end));
  const double n_a = static_cast<double>(tau - whole.start + 1);
  const double n_b = static_cast<double>(whole.end - tau);
  return SplitStatistic{tau, detail::split_statistic(sum_a, n_a, sum_b, n_b)};
}

struct SupLrResult {
  SplitStatistic best;
  std::size_t candidate_index = 0;  ///< position of best.tau in the candidate list
};

/// Maximum LR statistic over the candidate breakpoints. Ties go to the
/// smallest tau.
inline SupLrResult sup_lr(const CountSeries& series, const Interval& whole,
                          std::span<const std::size_t> candidates) {
  if (candidates.empty()) {
    throw argument_error("sup_lr requires at least one candidate breakpoint");
  }
  SupLrResult result;
  bool first = true;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const SplitStatistic s = lr_split_statistic(series, whole, candidates[i]);
    if (first || s.statistic > result.best.statistic ||
        (s.statistic == result.best.statistic && s.tau < result.best.tau)) {
      result.best = s;
      result.candidate_index = i;
      first = false;
    }
  }
  return result;
}

/// Candidate breakpoints first, first + 1, ..., last.
inline std::vector<std::size_t> candidate_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  if (last >= first) {
    out.reserve(last - first + 1);
    for (std::size_t t = first; t <= last; ++t) {
      out.push_back(t);
    }
  }
  return out;
}

/// Every split of `whole` that leaves both sides non-empty.
inline std::vector<std::size_t> interior_candidates(const Interval& whole) {
  if (whole.length() < 2) {
    return {};
  }
  return candidate_range(whole.start, whole.end - 1);
}

}  // namespace lpa
