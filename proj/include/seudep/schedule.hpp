#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "seudep/cdfg.hpp"
#include "seudep/error.hpp"

namespace seudep {

/// Units available per operation class.
using Allocation = std::map<std::string, int>;

/// A resource-constrained schedule: 1-based control step per node plus
/// the total number of control steps.
struct Schedule {
  std::vector<int> step;  // indexed like Cdfg::nodes
  int c_steps = 0;
};

namespace detail {

// ASAP labels: earliest step by precedence alone.
inline std::vector<int> asap_steps(const Cdfg& g) {
  std::vector<int> order = topo_order(g);
  std::vector<int> asap(g.nodes.size(), 1);
  for (int u : order)
    for (int v : g.succs[u]) asap[v] = std::max(asap[v], asap[u] + 1);
  return asap;
}

// ALAP labels against the critical-path latency bound.
inline std::vector<int> alap_steps(const Cdfg& g, int latency) {
  std::vector<int> order = topo_order(g);
  std::vector<int> alap(g.nodes.size(), latency);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    for (int v : g.succs[u]) alap[u] = std::min(alap[u], alap[v] - 1);
  }
  return alap;
}

/// Greedy list pass: ready operations ranked by ALAP slack (most
/// critical first), ties broken by ascending node id. Deterministic.
inline Schedule slack_list_pass(const Cdfg& g, const Allocation& alloc) {
  Schedule sched;
  sched.step.assign(g.nodes.size(), 0);

  const int n = static_cast<int>(g.nodes.size());
  const int cp = critical_path_length(g);
  std::vector<int> asap = detail::asap_steps(g);
  std::vector<int> alap = detail::alap_steps(g, cp);
  std::vector<int> slack(n);
  for (int i = 0; i < n; ++i) slack[i] = alap[i] - asap[i];

  std::vector<int> unscheduled_preds(n, 0);
  for (auto [u, v] : g.edges) {
    (void)u;
    ++unscheduled_preds[v];
  }

  auto more_urgent = [&](int a, int b) {
    if (slack[a] != slack[b]) return slack[a] < slack[b];
    return g.nodes[a].id < g.nodes[b].id;
  };

  std::vector<int> ready;
  for (int i = 0; i < n; ++i)
    if (unscheduled_preds[i] == 0) ready.push_back(i);

  int scheduled = 0;
  std::vector<int> next_ready;
  for (int step = 1; scheduled < n; ++step) {
    std::sort(ready.begin(), ready.end(), more_urgent);
    std::map<std::string, int> used;
    next_ready.clear();
    for (int v : ready) {
      int cap = alloc.at(g.nodes[v].op_class);
      if (used[g.nodes[v].op_class] < cap) {
        ++used[g.nodes[v].op_class];
        sched.step[v] = step;
        sched.c_steps = step;
        ++scheduled;
        for (int s : g.succs[v])
          if (--unscheduled_preds[s] == 0) next_ready.push_back(s);
      } else {
        next_ready.push_back(v);  // retry next step
      }
    }
    ready.swap(next_ready);
  }
  return sched;
}

/// Exact branch-and-bound refinement for small graphs. Searches over
/// per-step full-capacity selections (with unit latency, packing every
/// free unit is never worse), pruned by an earliest-start critical-path
/// bound and a visited cut. Only replaces the incumbent on strict
/// improvement, so the greedy assignment survives whenever it is
/// already optimal.
class ExactRefiner {
 public:
  ExactRefiner(const Cdfg& g, const Allocation& alloc, const Schedule& incumbent)
      : g_(g), best_(incumbent) {
    n_ = static_cast<int>(g.nodes.size());
    classes_ = g.op_classes();
    for (const auto& c : classes_) caps_.push_back(alloc.at(c));
    cls_of_.resize(n_);
    for (int v = 0; v < n_; ++v)
      cls_of_[v] = static_cast<int>(
          std::find(classes_.begin(), classes_.end(), g.nodes[v].op_class) - classes_.begin());
    order_ = topo_order(g);
    height_.assign(n_, 1);
    for (auto it = order_.rbegin(); it != order_.rend(); ++it)
      for (int s : g.succs[*it]) height_[*it] = std::max(height_[*it], height_[s] + 1);
  }

  Schedule run() {
    if (n_ == 0) return best_;
    std::vector<int> step_of(n_, 0);
    descend(0, 0, step_of);
    return best_;
  }

 private:
  int bound(std::uint64_t done, int t, const std::vector<int>& step_of) const {
    int lb = t;
    std::vector<int> remaining(caps_.size(), 0);
    std::vector<int> est(n_, 0);
    for (int v = 0; v < n_; ++v) {
      if (done >> v & 1) continue;
      ++remaining[cls_of_[v]];
      est[v] = t + 1;
      for (int p : g_.preds[v])
        if (done >> p & 1) est[v] = std::max(est[v], step_of[p] + 1);
    }
    for (int v : order_) {
      if (done >> v & 1) continue;
      for (int s : g_.succs[v])
        if (!(done >> s & 1)) est[s] = std::max(est[s], est[v] + 1);
      lb = std::max(lb, est[v] + height_[v] - 1);
    }
    for (std::size_t c = 0; c < caps_.size(); ++c)
      lb = std::max(lb, t + (remaining[c] + caps_[c] - 1) / caps_[c]);
    return lb;
  }

  void descend(std::uint64_t done, int t, std::vector<int>& step_of) {
    if (done == (1ULL << n_) - 1) {
      if (t < best_.c_steps) {
        best_.c_steps = t;
        best_.step = step_of;
      }
      return;
    }
    if (bound(done, t, step_of) >= best_.c_steps) return;
    auto seen = visited_.find(done);
    if (seen != visited_.end() && seen->second <= t) return;
    visited_[done] = t;

    std::vector<std::vector<int>> ready(caps_.size());
    for (int v = 0; v < n_; ++v) {
      if (done >> v & 1) continue;
      bool ok = true;
      for (int p : g_.preds[v])
        if (!(done >> p & 1) || step_of[p] > t) ok = false;
      if (ok) ready[cls_of_[v]].push_back(v);
    }
    for (auto& r : ready)
      std::sort(r.begin(), r.end(), [&](int a, int b) {
        if (height_[a] != height_[b]) return height_[a] > height_[b];
        return a < b;
      });

    std::vector<std::uint64_t> combined{0};
    for (std::size_t c = 0; c < caps_.size(); ++c) {
      int take = std::min<int>(caps_[c], static_cast<int>(ready[c].size()));
      std::vector<std::uint64_t> picks;
      choose(ready[c], 0, take, 0, picks);
      if (picks.empty()) picks.push_back(0);
      std::vector<std::uint64_t> next;
      next.reserve(combined.size() * picks.size());
      for (auto base : combined)
        for (auto p : picks) next.push_back(base | p);
      combined.swap(next);
    }
    for (auto mask : combined) {
      for (int v = 0; v < n_; ++v)
        if (mask >> v & 1) step_of[v] = t + 1;
      descend(done | mask, t + 1, step_of);
    }
  }

  static void choose(const std::vector<int>& items, std::size_t from, int take,
                     std::uint64_t acc, std::vector<std::uint64_t>& out) {
    if (take == 0) {
      out.push_back(acc);
      return;
    }
    if (items.size() - from < static_cast<std::size_t>(take)) return;
    for (std::size_t i = from; i < items.size(); ++i)
      choose(items, i + 1, take - 1, acc | (1ULL << items[i]), out);
  }

  const Cdfg& g_;
  int n_;
  std::vector<std::string> classes_;
  std::vector<int> caps_;
  std::vector<int> cls_of_;
  std::vector<int> height_;
  std::vector<int> order_;
  std::unordered_map<std::uint64_t, int> visited_;
  Schedule best_;
};

}  // namespace detail

/// Graphs up to this size get the exact refinement pass; larger ones
/// keep the greedy result.
inline constexpr std::size_t kExactScheduleLimit = 18;

/// Minimum-latency resource-constrained schedule with unit-latency
/// operations. The workhorse is ALAP-slack list scheduling; on small
/// graphs where the greedy pass leaves a gap above the critical-path /
/// bin-packing lower bound, an exact branch-and-bound pass closes it.
/// Output is deterministic for identical input.
inline Schedule list_schedule(const Cdfg& g, const Allocation& alloc) {
  Schedule sched;
  sched.step.assign(g.nodes.size(), 0);
  if (g.nodes.empty()) return sched;

  for (const auto& cls : g.op_classes()) {
    auto it = alloc.find(cls);
    if (it == alloc.end() || it->second < 1)
      throw error("list_schedule: infeasible allocation: no units for op class '" + cls + "'");
  }

  sched = detail::slack_list_pass(g, alloc);

  if (g.nodes.size() <= kExactScheduleLimit) {
    int lb = critical_path_length(g);
    std::map<std::string, int> count;
    for (const auto& n : g.nodes) count[n.op_class]++;
    for (const auto& [cls, cnt] : count)
      lb = std::max(lb, (cnt + alloc.at(cls) - 1) / alloc.at(cls));
    if (sched.c_steps > lb) sched = detail::ExactRefiner(g, alloc, sched).run();
  }
  return sched;
}

/// Audit helper: precedence and per-step capacity of an assignment.
inline bool schedule_is_valid(const Cdfg& g, const Allocation& alloc, const Schedule& s) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (s.step[i] < 1 || s.step[i] > s.c_steps) return false;
  for (auto [u, v] : g.edges)
    if (!(s.step[u] < s.step[v])) return false;
  std::map<std::pair<int, std::string>, int> load;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    int used = ++load[{s.step[i], g.nodes[i].op_class}];
    auto it = alloc.find(g.nodes[i].op_class);
    if (it == alloc.end() || used > it->second) return false;
  }
  int maxstep = 0;
  for (int st : s.step) maxstep = std::max(maxstep, st);
  return maxstep == s.c_steps || g.nodes.empty();
}

/// Results per second for a c_steps-long schedule at clock rate eta.
inline double throughput(int c_steps, double eta) {
  if (c_steps < 1) throw error("throughput: unschedulable/failed state has no throughput");
  if (!(eta > 0.0)) throw error("throughput: clock rate must be > 0");
  return eta / static_cast<double>(c_steps);
}

/// Throughput of a degraded schedule relative to the best one; the
/// clock rate cancels, leaving c_steps_min / c_steps in (0, 1].
inline double normalized_throughput(int c_steps, int c_steps_min) {
  if (c_steps_min < 1 || c_steps < c_steps_min)
    throw error("normalized_throughput: inconsistent normalization (c_steps=" +
                std::to_string(c_steps) + ", min=" + std::to_string(c_steps_min) + ")");
  return static_cast<double>(c_steps_min) / static_cast<double>(c_steps);
}

}  // namespace seudep
