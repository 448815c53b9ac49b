#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seudep/error.hpp"

namespace seudep::detail {

/// Truncated Poisson(m) weights for uniformization sums.
///
/// Weights are generated from the mode by the two-sided recurrence
/// p(k+1) = p(k) * m/(k+1), p(k-1) = p(k) * k/m, anchored at the
/// mode's log-density, then renormalized to sum to one so rounding
/// never leaks probability mass. The truncation window [left, right]
/// carries all but at most `epsilon` of the distribution, split
/// between the two tails.
struct PoissonWindow {
  std::int64_t left = 0;
  std::int64_t right = 0;
  std::vector<double> pmf;  // pmf[i] = P[N = left + i], renormalized

  double mass_below_left = 0.0;  // upper bound on the discarded left tail

  /// P[N > k] under the truncated, renormalized weights. Exact 1 for
  /// k < left up to the discarded tail; 0 beyond right.
  std::vector<double> tail_greater() const {
    std::vector<double> tail(pmf.size());
    double acc = 0.0;
    for (std::size_t i = pmf.size(); i-- > 0;) {
      tail[i] = acc;
      acc += pmf[i];
    }
    return tail;
  }
};

inline PoissonWindow poisson_window(double m, double epsilon) {
  if (!(m >= 0.0)) throw error("poisson_window: negative mean");
  PoissonWindow w;
  if (m == 0.0) {
    w.left = 0;
    w.right = 0;
    w.pmf = {1.0};
    return w;
  }

  const std::int64_t mode = static_cast<std::int64_t>(m);
  // log pmf at the mode, stable for any m.
  const double log_at_mode = -m + mode * std::log(m) - std::lgamma(double(mode) + 1.0);

  // Walk right until the tail bound drops below epsilon/2. The
  // geometric-tail bound p(k) * (m/(k+1)) / (1 - m/(k+1)) dominates the
  // true remainder once k > m.
  std::vector<double> right_side;  // relative to mode, unnormalized
  {
    double p = 1.0;  // scaled by exp(log_at_mode)
    std::int64_t k = mode;
    right_side.push_back(p);
    while (true) {
      p *= m / double(k + 1);
      ++k;
      right_side.push_back(p);
      if (double(k) > m) {
        double q = m / double(k + 1);
        double tail_bound = p * q / (1.0 - q);
        if (tail_bound * std::exp(log_at_mode) < epsilon / 2.0) break;
      }
      if (k > mode + 40 + static_cast<std::int64_t>(20.0 * std::sqrt(m) + m)) break;
    }
  }
  std::vector<double> left_side;  // mode-1 downward, unnormalized
  {
    double p = 1.0;
    std::int64_t k = mode;
    double tail = 0.0;
    while (k > 0) {
      p *= double(k) / m;
      --k;
      left_side.push_back(p);
      // Crude but safe: the left remainder below k is at most k * p(k).
      tail = p * double(k);
      if (tail * std::exp(log_at_mode) < epsilon / 2.0 && left_side.size() >= 2) break;
    }
    w.mass_below_left = tail * std::exp(log_at_mode);
  }

  w.left = mode - static_cast<std::int64_t>(left_side.size());
  w.right = mode + static_cast<std::int64_t>(right_side.size()) - 1;
  w.pmf.resize(right_side.size() + left_side.size());
  for (std::size_t i = 0; i < left_side.size(); ++i)
    w.pmf[left_side.size() - 1 - i] = left_side[i];
  for (std::size_t i = 0; i < right_side.size(); ++i) w.pmf[left_side.size() + i] = right_side[i];

  double sum = 0.0;
  for (double p : w.pmf) sum += p;
  for (double& p : w.pmf) p /= sum;
  return w;
}

}  // namespace seudep::detail
