#pragma once

// Seeded random DAG instances for scheduler property tests.

#include <random>
#include <string>

#include "seudep/cdfg.hpp"
#include "seudep/schedule.hpp"

namespace seudep::testing {

struct RandomInstance {
  Cdfg cdfg;
  Allocation alloc;
};

inline RandomInstance random_dag(std::uint64_t seed, int max_nodes = 12) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node_count(2, max_nodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RandomInstance inst;
  const int n = node_count(rng);
  const double edge_prob = 0.1 + 0.35 * unit(rng);
  for (int i = 0; i < n; ++i) {
    CdfgNode node;
    node.id = "n" + std::to_string(i + 10);  // two digits keeps id order sane
    node.op_class = unit(rng) < 0.5 ? "add" : "mul";
    inst.cdfg.nodes.push_back(node);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unit(rng) < edge_prob) inst.cdfg.edges.emplace_back(i, j);
  detail::finalize_adjacency(inst.cdfg);

  std::uniform_int_distribution<int> units(1, 3);
  for (const auto& cls : inst.cdfg.op_classes()) inst.alloc[cls] = units(rng);
  // Keep both classes allocated so sub-allocations stay feasible.
  if (inst.alloc.find("add") == inst.alloc.end()) inst.alloc["add"] = units(rng);
  if (inst.alloc.find("mul") == inst.alloc.end()) inst.alloc["mul"] = units(rng);
  return inst;
}

}  // namespace seudep::testing
