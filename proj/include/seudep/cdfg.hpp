#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "seudep/charlib.hpp"
#include "seudep/error.hpp"

namespace seudep {

struct CdfgNode {
  std::string id;
  std::string op_class;
};

/// Operation DAG of the application. Edges run producer -> consumer.
/// Validated on construction: unique ids, edges reference existing
/// nodes, no cycles.
struct Cdfg {
  std::vector<CdfgNode> nodes;
  std::vector<std::pair<int, int>> edges;  // node indices

  std::vector<std::vector<int>> preds;
  std::vector<std::vector<int>> succs;

  int index_of(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
  }

  std::vector<std::string> op_classes() const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
      if (std::find(out.begin(), out.end(), n.op_class) == out.end()) out.push_back(n.op_class);
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

inline void finalize_adjacency(Cdfg& g) {
  g.preds.assign(g.nodes.size(), {});
  g.succs.assign(g.nodes.size(), {});
  for (auto [u, v] : g.edges) {
    g.succs[u].push_back(v);
    g.preds[v].push_back(u);
  }
}

// Kahn topological sort; throws on cycles.
inline std::vector<int> topo_order(const Cdfg& g) {
  std::vector<int> indeg(g.nodes.size(), 0);
  for (auto [u, v] : g.edges) {
    (void)u;
    ++indeg[v];
  }
  std::vector<int> queue, order;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (indeg[i] == 0) queue.push_back(static_cast<int>(i));
  while (!queue.empty()) {
    int u = queue.back();
    queue.pop_back();
    order.push_back(u);
    for (int v : g.succs[u])
      if (--indeg[v] == 0) queue.push_back(v);
  }
  if (order.size() != g.nodes.size()) throw error("cdfg: cycle detected");
  return order;
}

}  // namespace detail

/// Parse a CDFG document: { "nodes":[{"id","op"},...], "edges":[["a","b"],...] }.
inline Cdfg parse_cdfg(const std::string& text) {
  nlohmann::json doc = detail::parse_json_document(text, "cdfg");
  if (!doc.is_object()) throw error("cdfg: top level must be an object");

  Cdfg g;
  const auto& nodes = detail::require_field(doc, "nodes", "cdfg");
  if (!nodes.is_array()) throw error("cdfg.nodes: expected an array");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string where = "cdfg.nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_object()) throw error(where + ": expected an object");
    CdfgNode node;
    node.id = detail::require_string(detail::require_field(n, "id", where), where + ".id");
    node.op_class = detail::require_string(detail::require_field(n, "op", where), where + ".op");
    if (!index.emplace(node.id, static_cast<int>(g.nodes.size())).second)
      throw error(where + ": duplicate id '" + node.id + "'");
    g.nodes.push_back(std::move(node));
  }

  const auto& edges = detail::require_field(doc, "edges", "cdfg");
  if (!edges.is_array()) throw error("cdfg.edges: expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string where = "cdfg.edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw error(where + ": expected [\"from\",\"to\"]");
    auto from = index.find(e[0].get<std::string>());
    auto to = index.find(e[1].get<std::string>());
    if (from == index.end())
      throw error(where + ": dangling edge endpoint '" + e[0].get<std::string>() + "'");
    if (to == index.end())
      throw error(where + ": dangling edge endpoint '" + e[1].get<std::string>() + "'");
    g.edges.emplace_back(from->second, to->second);
  }

  detail::finalize_adjacency(g);
  detail::topo_order(g);  // cycle check
  return g;
}

inline Cdfg load_cdfg(const std::string& path) { return parse_cdfg(detail::read_file(path)); }

/// Longest path measured in nodes (each operation takes one control
/// step): a lower bound on any schedule length. Empty graph -> 0.
inline int critical_path_length(const Cdfg& g) {
  if (g.nodes.empty()) return 0;
  std::vector<int> order = detail::topo_order(g);
  std::vector<int> depth(g.nodes.size(), 1);
  int best = 0;
  for (int u : order) {
    for (int v : g.succs[u]) depth[v] = std::max(depth[v], depth[u] + 1);
  }
  for (int d : depth) best = std::max(best, d);
  return best;
}

}  // namespace seudep
