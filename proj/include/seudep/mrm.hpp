#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "seudep/cdfg.hpp"
#include "seudep/charlib.hpp"
#include "seudep/configuration.hpp"
#include "seudep/error.hpp"
#include "seudep/schedule.hpp"

namespace seudep {

enum class StateClass { Operational, Degraded, FailedSafe, FailedUnsafe };

inline const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::Operational: return "operational";
    case StateClass::Degraded: return "degraded";
    case StateClass::FailedSafe: return "failed_safe";
    case StateClass::FailedUnsafe: return "failed_unsafe";
  }
  return "?";
}

inline bool is_failed(StateClass c) {
  return c == StateClass::FailedSafe || c == StateClass::FailedUnsafe;
}

/// Healthy-unit counters per operation class. A counter equal to
/// total(class) + 1 is the unsafe sentinel: an undetected fault has
/// silenced that class and it stops failing further until scrubbed.
struct ModelState {
  std::vector<int> counts;
  bool operator==(const ModelState&) const = default;
};

/// Explicit-state continuous-time Markov reward model. `rates` is the
/// raw rate matrix R, self-loops included (the initial state carries
/// the scrub self-loop); per-state class labels and named reward
/// vectors ride along.
struct MarkovRewardModel {
  std::vector<std::string> classes;  // op-class order used by counters
  std::vector<int> base, spares, totals, min_alloc;

  std::vector<ModelState> states;
  int initial = 0;
  std::vector<std::vector<std::pair<int, double>>> rates;  // sorted by target index
  std::vector<StateClass> label;
  std::map<std::string, std::vector<double>> rewards;

  std::size_t size() const { return states.size(); }

  int class_index(const std::string& cls) const {
    for (std::size_t k = 0; k < classes.size(); ++k)
      if (classes[k] == cls) return static_cast<int>(k);
    return -1;
  }

  const std::vector<double>& reward(const std::string& name) const {
    auto it = rewards.find(name);
    if (it == rewards.end()) throw error("unknown reward '" + name + "'");
    return it->second;
  }

  double total_exit_rate(int s) const {
    double sum = 0.0;
    for (auto [to, r] : rates[s]) {
      (void)to;
      sum += r;
    }
    return sum;
  }

  std::vector<char> states_of(StateClass c) const {
    std::vector<char> v(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) v[i] = (label[i] == c);
    return v;
  }
};

namespace detail {

// States enumerate per-class counter values in the order
// total, total-1, ..., 1, 0, total+1 so the all-healthy initial
// state always lands at index 0.
inline std::vector<int> counter_values(int total) {
  std::vector<int> vals;
  for (int h = total; h >= 0; --h) vals.push_back(h);
  vals.push_back(total + 1);
  return vals;
}

inline void add_rate(std::vector<std::pair<int, double>>& row, int to, double rate) {
  for (auto& [t, r] : row) {
    if (t == to) {
      r += rate;
      return;
    }
  }
  row.emplace_back(to, rate);
}

}  // namespace detail

/// Build the coverage-refined Markov reward model for one configuration.
///
/// Per op class with healthy count h (not at its sentinel), the number
/// of active units is min(h, base): cold spares sit unpowered until a
/// failure pulls them in, so they accrue no failure rate while cold.
/// A detected fault moves the class to h-1 at rate C*active*lambda; an
/// undetected one jumps to the unsafe sentinel at rate (1-C)*active*lambda.
/// Blind scrubbing is a single synchronized transition from every state
/// back to the initial state at rate mu = 1/tau; at the initial state it
/// is a self-loop, kept so next-step operators read it.
inline MarkovRewardModel build_model(const Configuration& cfg, const CharacterizationLibrary& lib,
                                     const Cdfg& cdfg) {
  cfg.validate();

  MarkovRewardModel m;
  for (const auto& [cls, n] : cfg.base_alloc) {
    (void)n;
    m.classes.push_back(cls);
  }
  std::sort(m.classes.begin(), m.classes.end());

  const auto& env = lib.environment(cfg.environment);
  std::vector<double> lambda;
  for (const auto& cls : m.classes) {
    auto it = cfg.binding.find(cls);
    if (it == cfg.binding.end())
      throw error("build_model: unresolved binding for op class '" + cls + "'");
    const auto& comp = lib.component(it->second);
    if (comp.op_class != cls)
      throw error("build_model: component '" + comp.name + "' serves op class '" +
                  comp.op_class + "', bound to '" + cls + "'");
    lambda.push_back(failure_rate_per_day(comp, env));
    m.base.push_back(cfg.base_alloc.at(cls));
    int spare = 0;
    if (auto sp = cfg.spares.find(cls); sp != cfg.spares.end()) spare = sp->second;
    m.spares.push_back(spare);
    m.totals.push_back(m.base.back() + spare);
    m.min_alloc.push_back(cfg.min_alloc.at(cls));
  }

  for (const auto& cls : cdfg.op_classes())
    if (m.class_index(cls) < 0)
      throw error("build_model: cdfg uses op class '" + cls + "' absent from the configuration");

  // The base allocation must actually schedule the application.
  Schedule best = list_schedule(cdfg, cfg.base_alloc);
  const int c_min = std::max(best.c_steps, 1);

  const std::size_t k = m.classes.size();
  std::vector<std::vector<int>> values;
  std::size_t count = 1;
  for (std::size_t c = 0; c < k; ++c) {
    values.push_back(detail::counter_values(m.totals[c]));
    count *= values[c].size();
  }

  // Full product space, lexicographic over the per-class value order.
  m.states.resize(count);
  std::map<std::vector<int>, int> index;
  {
    std::vector<std::size_t> pos(k, 0);
    for (std::size_t i = 0; i < count; ++i) {
      ModelState st;
      st.counts.resize(k);
      for (std::size_t c = 0; c < k; ++c) st.counts[c] = values[c][pos[c]];
      index[st.counts] = static_cast<int>(i);
      m.states[i] = std::move(st);
      for (std::size_t c = k; c-- > 0;) {
        if (++pos[c] < values[c].size()) break;
        pos[c] = 0;
      }
    }
  }
  m.initial = 0;

  const double mu = cfg.scrub_rate_per_day();
  m.rates.assign(count, {});
  m.label.assign(count, StateClass::Degraded);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& st = m.states[i];

    bool unsafe = false, below_min = false, all_initial = true;
    for (std::size_t c = 0; c < k; ++c) {
      if (st.counts[c] == m.totals[c] + 1) unsafe = true;
      else if (st.counts[c] < m.min_alloc[c]) below_min = true;
      if (st.counts[c] != m.totals[c]) all_initial = false;
    }
    if (unsafe) m.label[i] = StateClass::FailedUnsafe;
    else if (below_min) m.label[i] = StateClass::FailedSafe;
    else if (all_initial) m.label[i] = StateClass::Operational;
    else m.label[i] = StateClass::Degraded;

    auto& row = m.rates[i];
    for (std::size_t c = 0; c < k; ++c) {
      int h = st.counts[c];
      if (h <= 0 || h > m.totals[c]) continue;  // exhausted or unsafe: stops failing
      double active = static_cast<double>(std::min(h, m.base[c]));
      double safe_rate = cfg.coverage * active * lambda[c];
      double unsafe_rate = (1.0 - cfg.coverage) * active * lambda[c];
      if (safe_rate > 0.0) {
        std::vector<int> next = st.counts;
        next[c] = h - 1;
        detail::add_rate(row, index.at(next), safe_rate);
      }
      if (unsafe_rate > 0.0) {
        std::vector<int> next = st.counts;
        next[c] = m.totals[c] + 1;
        detail::add_rate(row, index.at(next), unsafe_rate);
      }
    }
    detail::add_rate(row, m.initial, mu);  // synchronized blind scrub
    std::sort(row.begin(), row.end());
  }

  // Rewards: normalized throughput plus the class indicators.
  std::vector<double> thr(count, 0.0);
  std::map<std::vector<int>, double> memo;  // active alloc -> reward
  for (std::size_t i = 0; i < count; ++i) {
    if (is_failed(m.label[i])) continue;
    std::vector<int> active(k);
    for (std::size_t c = 0; c < k; ++c) active[c] = std::min(m.states[i].counts[c], m.base[c]);
    auto it = memo.find(active);
    if (it == memo.end()) {
      Allocation a;
      for (std::size_t c = 0; c < k; ++c) a[m.classes[c]] = active[c];
      Schedule s = list_schedule(cdfg, a);
      double reward = cdfg.nodes.empty() ? 1.0 : normalized_throughput(s.c_steps, c_min);
      it = memo.emplace(active, reward).first;
    }
    thr[i] = it->second;
  }
  m.rewards["throughput"] = std::move(thr);

  auto indicator = [&](StateClass c) {
    std::vector<double> v(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) v[i] = (m.label[i] == c) ? 1.0 : 0.0;
    return v;
  };
  m.rewards["operational"] = indicator(StateClass::Operational);
  m.rewards["degraded"] = indicator(StateClass::Degraded);
  m.rewards["failed_safe"] = indicator(StateClass::FailedSafe);
  m.rewards["failed_unsafe"] = indicator(StateClass::FailedUnsafe);
  std::vector<double> failed(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) failed[i] = is_failed(m.label[i]) ? 1.0 : 0.0;
  m.rewards["failed"] = std::move(failed);

  return m;
}

/// Implemented area in LUTs: every allocated unit, spares included,
/// occupies fabric whether or not it is powered.
inline long area(const Configuration& cfg, const CharacterizationLibrary& lib) {
  long total = 0;
  for (const auto& [cls, n] : cfg.base_alloc) {
    auto it = cfg.binding.find(cls);
    if (it == cfg.binding.end())
      throw error("area: unresolved binding for op class '" + cls + "'");
    int spare = 0;
    if (auto sp = cfg.spares.find(cls); sp != cfg.spares.end()) spare = sp->second;
    total += static_cast<long>(n + spare) * lib.component(it->second).lut_count;
  }
  return total;
}

/// Equal-weight throughput-per-area figure of merit.
inline double overall_reward(double expected_throughput, double normalized_area) {
  if (!(normalized_area > 0.0)) throw error("overall_reward: zero area");
  return expected_throughput / normalized_area;
}

}  // namespace seudep
