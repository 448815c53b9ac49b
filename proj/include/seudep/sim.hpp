#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "seudep/error.hpp"
#include "seudep/mrm.hpp"

namespace seudep {

using StateSet = std::vector<char>;

struct SimConfig {
  double horizon_days = 0.0;
  long trajectories = 1;
  std::uint64_t master_seed = 1;
  double confidence = 0.99;
  unsigned threads = 0;  // 0: use what the host offers
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
  long n = 0;
};

/// A measure sampled per trajectory.
///  ClassTime: time spent inside `set` over [0, horizon]
///  Invariance: indicator of never leaving `set` during [0, horizon]
///  TransientIndicator: indicator of being inside `set` at time `t`
///  ReachTime: first entry time into `set` (horizon ignored)
struct Measure {
  enum class Kind { ClassTime, Invariance, TransientIndicator, ReachTime } kind;
  std::string name;
  StateSet set;
  double t = 0.0;  // TransientIndicator only
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for one trajectory: a fixed function of (master seed,
/// trajectory index) so adding trajectories never reshuffles the
/// earlier ones.
inline std::uint64_t trajectory_seed(std::uint64_t master, long index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1));
  splitmix64(s);
  return splitmix64(s);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_exponential(std::mt19937_64& rng, double rate) {
  double u = uniform01(rng);
  return -std::log1p(-u) / rate;
}

struct Welford {
  double sum = 0.0, sumsq = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const Welford& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
};

/// Two-sided normal quantile from the confidence level, via bisection
/// on erf. Deterministic and accurate far beyond what a CI needs.
inline double normal_quantile_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw error("simulate: confidence must be in (0,1)");
  double target = confidence;  // P(|Z| <= z) = erf(z / sqrt 2)
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (std::erf(mid / std::sqrt(2.0)) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Per-state transition table flattened for the event loop. Self-loops
/// are thinned out up front: a race a self-loop wins leaves the state,
/// the occupation times, and every first-entry time untouched, so the
/// loop only ever samples state-changing events.
struct CompiledChain {
  std::vector<double> total_rate;
  std::vector<std::size_t> row_begin;  // into targets/cum_rate, n+1 entries
  std::vector<int> targets;
  std::vector<double> cum_rate;

  explicit CompiledChain(const MarkovRewardModel& m) {
    const std::size_t n = m.size();
    total_rate.assign(n, 0.0);
    row_begin.assign(n + 1, 0);
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t kept = 0;
      for (auto [to, rate] : m.rates[s])
        if (static_cast<std::size_t>(to) != s && rate > 0.0) ++kept;
      row_begin[s + 1] = row_begin[s] + kept;
    }
    targets.resize(row_begin[n]);
    cum_rate.resize(row_begin[n]);
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      std::size_t i = row_begin[s];
      for (auto [to, rate] : m.rates[s]) {
        if (static_cast<std::size_t>(to) == s || rate <= 0.0) continue;
        acc += rate;
        targets[i] = to;
        cum_rate[i] = acc;
        ++i;
      }
      total_rate[s] = acc;
    }
  }
};

/// One trajectory for one measure. Each event is the winner of the
/// exponential race over the enabled transitions, sampled through the
/// superposition of the clocks: one exponential at the total exit rate
/// for the event time, one categorical draw proportional to the rates
/// for the winner.
inline double run_trajectory(const MarkovRewardModel& m, const CompiledChain& chain,
                             const Measure& measure, double horizon, std::mt19937_64& rng) {
  int state = m.initial;
  double now = 0.0;

  double class_time = 0.0;
  const bool need_class = measure.kind == Measure::Kind::ClassTime;
  const double stop_at = (measure.kind == Measure::Kind::TransientIndicator) ? measure.t : horizon;

  if (measure.kind == Measure::Kind::ReachTime && measure.set[m.initial]) return 0.0;
  if (measure.kind == Measure::Kind::Invariance && !measure.set[m.initial]) return 0.0;

  while (true) {
    const double rate = chain.total_rate[state];
    const double dt = rate > 0.0 ? sample_exponential(rng, rate)
                                 : std::numeric_limits<double>::infinity();
    const double leave = now + dt;
    if (measure.kind == Measure::Kind::ReachTime) {
      if (!(leave < 1e15)) throw error("simulate: reach-time trajectory stuck in absorbing state");
    } else if (leave >= stop_at) {
      if (need_class && measure.set[state]) class_time += stop_at - now;
      switch (measure.kind) {
        case Measure::Kind::ClassTime: return class_time;
        case Measure::Kind::Invariance: return 1.0;
        case Measure::Kind::TransientIndicator: return measure.set[state] ? 1.0 : 0.0;
        case Measure::Kind::ReachTime: break;
      }
    }

    if (need_class && measure.set[state]) class_time += dt;
    now = leave;

    const double pick = uniform01(rng) * rate;
    int next = state;
    for (std::size_t i = chain.row_begin[state]; i < chain.row_begin[state + 1]; ++i) {
      next = chain.targets[i];
      if (pick < chain.cum_rate[i]) break;
    }
    state = next;

    if (measure.kind == Measure::Kind::ReachTime && measure.set[state]) return now;
    if (measure.kind == Measure::Kind::Invariance && !measure.set[state]) return 0.0;
  }
}

}  // namespace detail

/// Seeded Monte Carlo estimates for a list of measures, one estimate
/// per measure keyed by the measure name. Identical inputs give
/// identical output; trajectories split across threads in fixed blocks
/// and merge in block order so threading does not change the result.
inline std::map<std::string, Estimate> simulate_measures(const MarkovRewardModel& m,
                                                         const SimConfig& cfg,
                                                         const std::vector<Measure>& measures) {
  if (cfg.trajectories < 1) throw error("simulate: need at least one trajectory");
  if (cfg.horizon_days < 0.0) throw error("simulate: negative horizon");
  for (const auto& ms : measures)
    if (ms.set.size() != m.size()) throw error("simulate: measure set size mismatch");

  const double z = detail::normal_quantile_two_sided(cfg.confidence);
  unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  const long block = 4096;
  const detail::CompiledChain chain(m);

  std::map<std::string, Estimate> out;
  for (const auto& measure : measures) {
    const long n = cfg.trajectories;
    const long blocks = (n + block - 1) / block;
    std::vector<detail::Welford> per_block(static_cast<std::size_t>(blocks));

    std::atomic<long> next_block{0};
    auto worker = [&]() {
      while (true) {
        long b = next_block.fetch_add(1);
        if (b >= blocks) break;
        detail::Welford w;
        long lo = b * block, hi = std::min(n, lo + block);
        for (long i = lo; i < hi; ++i) {
          std::mt19937_64 rng(detail::trajectory_seed(cfg.master_seed, i));
          w.add(detail::run_trajectory(m, chain, measure, cfg.horizon_days, rng));
        }
        per_block[static_cast<std::size_t>(b)] = w;
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    detail::Welford total;
    for (const auto& w : per_block) total.merge(w);
    Estimate est;
    est.n = total.n;
    est.mean = total.sum / static_cast<double>(total.n);
    double var = 0.0;
    if (total.n > 1)
      var = std::max(0.0, (total.sumsq - total.sum * total.sum / total.n) / (total.n - 1));
    est.half_width = z * std::sqrt(var / static_cast<double>(total.n));
    out[measure.name] = est;
  }
  return out;
}

}  // namespace seudep
