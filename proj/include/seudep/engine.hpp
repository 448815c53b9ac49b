#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "seudep/error.hpp"
#include "seudep/linalg.hpp"
#include "seudep/mrm.hpp"
#include "seudep/poisson.hpp"

namespace seudep {

/// Per-state probabilities; sums to 1 within kDistributionTolerance.
using Distribution = std::vector<double>;

using StateSet = std::vector<char>;  // predicate over state indices

struct EngineOptions {
  double uniformization_slack = 1.02;  // Lambda = slack * max |Q(s,s)|
  double poisson_epsilon = 1e-10;      // truncation mass for transient sums
  double steady_residual = 1e-12;      // ||pi Q||_inf target
  double linear_residual = 1e-12;      // embedded-chain solves
  std::size_t direct_solve_limit = 4096;  // above this, iterate instead
  std::size_t max_power_iterations = 20000000;
};

inline constexpr double kDistributionTolerance = 1e-9;

namespace detail {

/// Generator view of a model: Q = R with self-loops removed and the
/// diagonal set to minus the off-diagonal row sum. Self-loops change
/// neither transient nor stationary behavior, so the engine drops them
/// everywhere except the raw next-step operator.
struct Generator {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<int, double>>> off;  // off-diagonal rates
  std::vector<double> exit;                              // row sums of `off`
  double max_exit = 0.0;

  explicit Generator(const MarkovRewardModel& m) {
    n = m.size();
    off.resize(n);
    exit.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (auto [to, r] : m.rates[s]) {
        if (static_cast<std::size_t>(to) == s) continue;
        off[s].emplace_back(to, r);
        exit[s] += r;
      }
      max_exit = std::max(max_exit, exit[s]);
    }
  }

  /// y = x P where P = I + Q/Lambda (row vector times matrix).
  void apply_uniformized_left(const std::vector<double>& x, std::vector<double>& y,
                              double lambda) const {
    for (std::size_t s = 0; s < n; ++s) y[s] = x[s] * (1.0 - exit[s] / lambda);
    for (std::size_t s = 0; s < n; ++s) {
      if (x[s] == 0.0) continue;
      for (auto [to, r] : off[s]) y[to] += x[s] * (r / lambda);
    }
  }

  /// y = P x (matrix times column vector), used by backward sums.
  void apply_uniformized_right(const std::vector<double>& x, std::vector<double>& y,
                               double lambda) const {
    for (std::size_t s = 0; s < n; ++s) {
      double acc = x[s] * (1.0 - exit[s] / lambda);
      for (auto [to, r] : off[s]) acc += (r / lambda) * x[to];
      y[s] = acc;
    }
  }

  /// residual ||x Q||_inf
  double residual_left(const std::vector<double>& x) const {
    std::vector<double> y(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      y[s] -= x[s] * exit[s];
      if (x[s] == 0.0) continue;
      for (auto [to, r] : off[s]) y[to] += x[s] * r;
    }
    double worst = 0.0;
    for (double v : y) worst = std::max(worst, std::fabs(v));
    return worst;
  }
};

inline std::vector<int> forward_reachable(const MarkovRewardModel& m, int from) {
  std::vector<char> seen(m.size(), 0);
  std::vector<int> stack{from}, out;
  seen[from] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    out.push_back(s);
    for (auto [to, r] : m.rates[s])
      if (r > 0.0 && !seen[to]) {
        seen[to] = 1;
        stack.push_back(to);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Distribution clamp_distribution(Distribution p) {
  double sum = 0.0;
  for (double& v : p) {
    if (v < 0.0) {
      if (v < -1e-12)
        throw error("distribution entry below -1e-12: " + std::to_string(v));
      v = 0.0;  // clamp tiny negative round-off
    }
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kDistributionTolerance)
    throw error("distribution does not sum to 1 (sum=" + std::to_string(sum) + ")");
  return p;
}

}  // namespace detail

/// Stationary distribution over the reachable state set (zero
/// elsewhere). Requires that set to be one closed communicating class,
/// which is checked, not assumed.
inline Distribution steady_state(const MarkovRewardModel& m, const EngineOptions& opts = {}) {
  const std::size_t n = m.size();
  detail::Generator gen(m);

  std::vector<int> reach = detail::forward_reachable(m, m.initial);
  // Closed communicating class: every reachable state must reach the
  // initial state back. Walk the reversed edges restricted to `reach`.
  {
    std::vector<char> inreach(n, 0);
    for (int s : reach) inreach[s] = 1;
    std::vector<std::vector<int>> rev(n);
    for (int s : reach)
      for (auto [to, r] : m.rates[s])
        if (r > 0.0 && inreach[to]) rev[to].push_back(s);
    std::vector<char> seen(n, 0);
    std::vector<int> stack{m.initial};
    seen[m.initial] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int p : rev[s])
        if (!seen[p]) {
          seen[p] = 1;
          stack.push_back(p);
        }
    }
    for (int s : reach)
      if (!seen[s])
        throw error("steady_state: not ergodic (state " + std::to_string(s) +
                    " cannot return to the initial state)");
  }

  const std::size_t r = reach.size();
  std::vector<int> local(n, -1);
  for (std::size_t i = 0; i < r; ++i) local[reach[i]] = static_cast<int>(i);

  Distribution pi(n, 0.0);
  if (r == 1) {
    pi[reach[0]] = 1.0;
    return pi;
  }

  if (r <= opts.direct_solve_limit) {
    // Solve Q^T pi = 0 with the last equation replaced by sum(pi) = 1.
    detail::DenseMatrix a(r, r);
    for (std::size_t i = 0; i < r; ++i) {
      int s = reach[i];
      a(i, i) -= gen.exit[s];
      for (auto [to, rate] : gen.off[s])
        if (local[to] >= 0) a(static_cast<std::size_t>(local[to]), i) += rate;
    }
    for (std::size_t j = 0; j < r; ++j) a(r - 1, j) = 1.0;
    std::vector<double> b(r, 0.0);
    b[r - 1] = 1.0;
    // Transpose convention: rows of `a` are equations over pi entries.
    std::vector<double> x = detail::lu_solve(a, b);
    for (std::size_t i = 0; i < r; ++i) pi[reach[i]] = x[i];
  } else {
    // Successive substitution on the uniformized chain.
    double lambda = opts.uniformization_slack * std::max(gen.max_exit, 1e-300);
    std::vector<double> x(n, 0.0), y(n, 0.0);
    x[m.initial] = 1.0;
    for (std::size_t it = 0; it < opts.max_power_iterations; ++it) {
      gen.apply_uniformized_left(x, y, lambda);
      x.swap(y);
      if (it % 32 == 31 && gen.residual_left(x) <= opts.steady_residual) break;
    }
    pi = x;
  }

  double resid = gen.residual_left(pi);
  if (resid > opts.steady_residual) {
    // One sweep of iterative refinement through the uniformized chain
    // usually drags direct-solve round-off below the target.
    double lambda = opts.uniformization_slack * std::max(gen.max_exit, 1e-300);
    std::vector<double> y(n, 0.0);
    for (int sweep = 0; sweep < 64 && resid > opts.steady_residual; ++sweep) {
      gen.apply_uniformized_left(pi, y, lambda);
      pi.swap(y);
      resid = gen.residual_left(pi);
    }
    if (resid > opts.steady_residual)
      throw error("steady_state: residual " + std::to_string(resid) + " above target");
  }
  double sum = 0.0;
  for (double v : pi) sum += v;
  for (double& v : pi) v /= sum;
  return detail::clamp_distribution(std::move(pi));
}

/// Transient distribution pi0 * exp(Q t) by uniformization.
inline Distribution transient(const MarkovRewardModel& m, const Distribution& pi0, double t,
                              const EngineOptions& opts = {}) {
  if (t < 0.0) throw error("transient: negative time");
  if (pi0.size() != m.size()) throw error("transient: distribution size mismatch");
  detail::Generator gen(m);
  double lambda = opts.uniformization_slack * gen.max_exit;
  if (t == 0.0 || lambda == 0.0) return detail::clamp_distribution(pi0);

  auto win = detail::poisson_window(lambda * t, opts.poisson_epsilon);
  std::vector<double> v = pi0, next(m.size(), 0.0);
  Distribution out(m.size(), 0.0);
  for (std::int64_t k = 0; k <= win.right; ++k) {
    if (k >= win.left) {
      double w = win.pmf[static_cast<std::size_t>(k - win.left)];
      for (std::size_t s = 0; s < m.size(); ++s) out[s] += w * v[s];
    }
    if (k < win.right) {
      gen.apply_uniformized_left(v, next, lambda);
      v.swap(next);
    }
  }
  return detail::clamp_distribution(std::move(out));
}

/// Expected reward accumulated over [0, T] from the initial state:
/// E[ integral_0^T r(X(u)) du ]. The uniformized sum uses Poisson
/// upper-tail weights, integral pois_k(u) du = P[N(T) > k] / Lambda.
inline double cumulative_reward(const MarkovRewardModel& m, const std::string& reward_name,
                                double T, const EngineOptions& opts = {}) {
  if (T < 0.0) throw error("cumulative_reward: negative horizon");
  const auto& r = m.reward(reward_name);
  if (T == 0.0) return 0.0;
  detail::Generator gen(m);
  double lambda = opts.uniformization_slack * gen.max_exit;
  if (lambda == 0.0) return r[m.initial] * T;  // no transitions at all

  // A wider right edge than the transient window: the tail sum of
  // P[N > k] terms decays one order slower than the pmf itself.
  double mean = lambda * T;
  auto win = detail::poisson_window(mean, opts.poisson_epsilon * 1e-3);
  auto tail = win.tail_greater();

  std::vector<double> v(m.size(), 0.0), next(m.size(), 0.0);
  v[m.initial] = 1.0;
  double acc = 0.0;
  for (std::int64_t k = 0;; ++k) {
    double tk;
    if (k < win.left) tk = 1.0;
    else if (k <= win.right) tk = tail[static_cast<std::size_t>(k - win.left)];
    else break;
    if (k > win.left && tk <= 0.0) break;
    double vr = 0.0;
    for (std::size_t s = 0; s < m.size(); ++s) vr += v[s] * r[s];
    acc += tk * vr / lambda;
    gen.apply_uniformized_left(v, next, lambda);
    v.swap(next);
  }
  return acc;
}

inline double expected_steady_reward(const MarkovRewardModel& m, const std::string& reward_name,
                                     const EngineOptions& opts = {}) {
  const auto& r = m.reward(reward_name);
  Distribution pi = steady_state(m, opts);
  double acc = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) acc += pi[s] * r[s];
  return acc;
}

inline double expected_transient_reward(const MarkovRewardModel& m,
                                        const std::string& reward_name, double t,
                                        const EngineOptions& opts = {}) {
  const auto& r = m.reward(reward_name);
  Distribution p0(m.size(), 0.0);
  p0[m.initial] = 1.0;
  Distribution pt = transient(m, p0, t, opts);
  double acc = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) acc += pt[s] * r[s];
  return acc;
}

namespace detail {

/// Backward uniformization with a set of states made absorbing:
/// returns v(s) = sum_k pois_k * (P~^k g)(s), i.e. e^{Q~ t} g.
inline std::vector<double> absorbing_transient_backward(const MarkovRewardModel& m,
                                                        const StateSet& absorbing,
                                                        const std::vector<double>& g, double t,
                                                        const EngineOptions& opts) {
  Generator gen(m);
  for (std::size_t s = 0; s < m.size(); ++s)
    if (absorbing[s]) {
      gen.off[s].clear();
      gen.exit[s] = 0.0;
    }
  double lambda = opts.uniformization_slack * gen.max_exit;
  if (t == 0.0 || lambda == 0.0) return g;

  auto win = poisson_window(lambda * t, opts.poisson_epsilon);
  std::vector<double> x = g, next(m.size(), 0.0), out(m.size(), 0.0);
  for (std::int64_t k = 0; k <= win.right; ++k) {
    if (k >= win.left) {
      double w = win.pmf[static_cast<std::size_t>(k - win.left)];
      for (std::size_t s = 0; s < m.size(); ++s) out[s] += w * x[s];
    }
    if (k < win.right) {
      gen.apply_uniformized_right(x, next, lambda);
      x.swap(next);
    }
  }
  return out;
}

}  // namespace detail

/// Per-state probability of staying inside `good` throughout [0, T].
inline std::vector<double> invariance_prob_all(const MarkovRewardModel& m, const StateSet& good,
                                               double T, const EngineOptions& opts = {}) {
  if (T < 0.0) throw error("invariance_prob: negative horizon");
  StateSet absorbing(m.size(), 0);
  std::vector<double> g(m.size(), 0.0);
  for (std::size_t s = 0; s < m.size(); ++s) {
    absorbing[s] = !good[s];
    g[s] = good[s] ? 1.0 : 0.0;
  }
  return detail::absorbing_transient_backward(m, absorbing, g, T, opts);
}

inline double invariance_prob(const MarkovRewardModel& m, const StateSet& good, double T,
                              const EngineOptions& opts = {}) {
  return invariance_prob_all(m, good, T, opts)[m.initial];
}

/// Per-state P[ phi1 U^{<=t} phi2 ] by the usual two-phase absorbing
/// transformation (phi2 and the dead states both absorb).
inline std::vector<double> bounded_until(const MarkovRewardModel& m, const StateSet& phi1,
                                         const StateSet& phi2, double t,
                                         const EngineOptions& opts = {}) {
  if (t < 0.0) throw error("bounded_until: negative time bound");
  StateSet absorbing(m.size(), 0);
  std::vector<double> g(m.size(), 0.0);
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (phi2[s]) {
      absorbing[s] = 1;
      g[s] = 1.0;
    } else if (!phi1[s]) {
      absorbing[s] = 1;
    }
  }
  return detail::absorbing_transient_backward(m, absorbing, g, t, opts);
}

/// One-jump probability of landing in phi, self-loops included on both
/// sides of the ratio. This is the only operator that reads the raw
/// rate matrix rather than the generator.
inline std::vector<double> next_prob(const MarkovRewardModel& m, const StateSet& phi) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t s = 0; s < m.size(); ++s) {
    double total = 0.0, hit = 0.0;
    for (auto [to, r] : m.rates[s]) {
      total += r;
      if (phi[to]) hit += r;
    }
    if (total <= 0.0)
      throw error("next_prob: state " + std::to_string(s) + " has no outgoing rate");
    out[s] = hit / total;
  }
  return out;
}

/// Per-state P[ phi1 U phi2 ] on the embedded jump chain.
inline std::vector<double> unbounded_until(const MarkovRewardModel& m, const StateSet& phi1,
                                           const StateSet& phi2,
                                           const EngineOptions& opts = {}) {
  const std::size_t n = m.size();
  detail::Generator gen(m);  // self-loop mass renormalized away

  // prob0: states with no phi1-path to phi2 have probability zero.
  std::vector<char> can_reach(n, 0);
  {
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s)
      if (phi2[s]) {
        can_reach[s] = 1;
        stack.push_back(static_cast<int>(s));
      }
    std::vector<std::vector<int>> rev(n);
    for (std::size_t s = 0; s < n; ++s)
      for (auto [to, r] : gen.off[s])
        if (r > 0.0) rev[to].push_back(static_cast<int>(s));
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int p : rev[s])
        if (!can_reach[p] && phi1[p] && !phi2[p]) {
          can_reach[p] = 1;
          stack.push_back(p);
        }
    }
  }

  std::vector<double> x(n, 0.0);
  std::vector<int> maybe;  // phi1, not phi2, phi2 reachable
  std::vector<int> local(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (phi2[s]) x[s] = 1.0;
    else if (phi1[s] && can_reach[s]) {
      local[s] = static_cast<int>(maybe.size());
      maybe.push_back(static_cast<int>(s));
    }
  }
  if (maybe.empty()) return x;

  const std::size_t k = maybe.size();
  detail::DenseMatrix a(k, k);
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    int s = maybe[i];
    a(i, i) = 1.0;
    for (auto [to, r] : gen.off[s]) {
      double p = r / gen.exit[s];
      if (local[to] >= 0) a(i, static_cast<std::size_t>(local[to])) -= p;
      else b[i] += p * x[to];
    }
  }
  std::vector<double> sol = detail::lu_solve(a, b);
  for (std::size_t i = 0; i < k; ++i) x[maybe[i]] = std::min(1.0, std::max(0.0, sol[i]));

  // Residual audit on the fixed-point equations.
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    int s = maybe[i];
    double rhs = 0.0;
    for (auto [to, r] : gen.off[s]) rhs += (r / gen.exit[s]) * x[to];
    worst = std::max(worst, std::fabs(x[s] - rhs));
  }
  if (worst > std::max(opts.linear_residual, 1e-10))
    throw error("unbounded_until: residual " + std::to_string(worst) + " above target");
  return x;
}

/// Expected reward accumulated from the initial state until first
/// entering `target`. Errors out unless the target is hit with
/// probability one from everywhere the chain can go.
inline double reach_reward(const MarkovRewardModel& m, const std::string& reward_name,
                           const StateSet& target, const EngineOptions& opts = {}) {
  (void)opts;
  const auto& r = m.reward(reward_name);
  const std::size_t n = m.size();
  if (target[m.initial]) return 0.0;

  detail::Generator gen(m);
  std::vector<int> reach = detail::forward_reachable(m, m.initial);
  // Probability-one check: every reachable state must be able to reach
  // the target; in a finite chain that rules out avoiding it forever.
  {
    std::vector<char> can(n, 0);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s)
      if (target[s]) {
        can[s] = 1;
        stack.push_back(static_cast<int>(s));
      }
    std::vector<std::vector<int>> rev(n);
    for (std::size_t s = 0; s < n; ++s)
      for (auto [to, rate] : gen.off[s])
        if (rate > 0.0) rev[to].push_back(static_cast<int>(s));
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int p : rev[s])
        if (!can[p]) {
          can[p] = 1;
          stack.push_back(p);
        }
    }
    for (int s : reach)
      if (!can[s]) throw error("reach_reward: infinite expected reward possible");
  }

  // Solve sum_j Q(s,j) g(j) = -r(s) on reachable non-target states.
  std::vector<int> maybe, local(n, -1);
  for (int s : reach)
    if (!target[s]) {
      local[s] = static_cast<int>(maybe.size());
      maybe.push_back(s);
    }
  if (maybe.empty()) return 0.0;
  const std::size_t k = maybe.size();
  detail::DenseMatrix a(k, k);
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    int s = maybe[i];
    a(i, i) = -gen.exit[s];
    b[i] = -r[s];
    for (auto [to, rate] : gen.off[s])
      if (local[to] >= 0) a(i, static_cast<std::size_t>(local[to])) += rate;
  }
  std::vector<double> g = detail::lu_solve(a, b);
  return g[static_cast<std::size_t>(local[m.initial])];
}

}  // namespace seudep
