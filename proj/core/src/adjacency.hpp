#pragma once

// Internal adjacency helpers shared by validation, routing, and the support
// machinery. Not installed.

#include <vector>

#include "wardrop/types.hpp"

namespace wardrop::detail {

/// Out-adjacency (vertex -> list of edge indices) over a subset of edges.
inline std::vector<std::vector<int>> out_adjacency(const Instance& inst,
                                                   const std::vector<int>& edge_set) {
  std::vector<std::vector<int>> adj(inst.num_vertices());
  for (int e : edge_set) adj[inst.edges[e].tail].push_back(e);
  return adj;
}

/// Vertices reachable from `start` along directed edges in `edge_set`.
inline std::vector<bool> reachable_from(const Instance& inst, int start,
                                        const std::vector<int>& edge_set) {
  auto adj = out_adjacency(inst, edge_set);
  std::vector<bool> seen(inst.num_vertices(), false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : adj[v]) {
      int w = inst.edges[e].head;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

/// Vertices that can reach `goal` along directed edges in `edge_set`.
inline std::vector<bool> coreachable_to(const Instance& inst, int goal,
                                        const std::vector<int>& edge_set) {
  std::vector<std::vector<int>> in_adj(inst.num_vertices());
  for (int e : edge_set) in_adj[inst.edges[e].head].push_back(e);
  std::vector<bool> seen(inst.num_vertices(), false);
  std::vector<int> stack{goal};
  seen[goal] = true;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : in_adj[v]) {
      int w = inst.edges[e].tail;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace wardrop::detail
