#pragma once

// Shared fixtures and random-instance builders for the test suites.

#include <functional>
#include <vector>

#include "wardrop/generators.hpp"
#include "wardrop/rng.hpp"
#include "wardrop/types.hpp"

namespace testutil {

inline wardrop::Edge edge(std::string id, int tail, int head, std::vector<double> slope,
                          std::vector<double> offset) {
  wardrop::Edge e;
  e.id = std::move(id);
  e.tail = tail;
  e.head = head;
  e.slope = std::move(slope);
  e.offset = std::move(offset);
  return e;
}

/// Random two-state parallel-link instance with strictly positive slopes.
inline wardrop::Instance random_parallel(wardrop::Rng& rng, int max_links = 10,
                                         double demand = 0.0) {
  int m = 2 + static_cast<int>(rng.below(max_links - 1));
  std::vector<wardrop::Edge> edges;
  for (int e = 0; e < m; ++e)
    edges.push_back(edge("e" + std::to_string(e + 1), 0, 1,
                         {0.0, 0.0},  // filled below
                         {rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0)}));
  for (auto& ed : edges) {
    double a = rng.uniform(0.5, 2.0);
    ed.slope = {a, a};
  }
  double d = demand > 0.0 ? demand : rng.uniform(0.5, 2.0);
  return wardrop::make_instance({"s", "t"}, std::move(edges),
                                {wardrop::Commodity{0, 1, d, std::nullopt}},
                                {{"theta1", "theta2"}, {0.5, 0.5}});
}

/// Random two-terminal series-parallel network with offsets-only two-state
/// costs, built from a random composition tree with `leaves` edges.
inline wardrop::Instance random_sp_instance(wardrop::Rng& rng, int leaves = 6) {
  std::vector<std::string> vertices{"s", "t"};
  std::vector<wardrop::Edge> edges;
  int next_edge = 0;

  // recursively realize a random SP tree between two concrete vertices
  std::function<void(int, int, int)> grow = [&](int s, int t, int size) {
    if (size <= 1) {
      double a = rng.uniform(0.2, 2.0);
      edges.push_back(edge("e" + std::to_string(++next_edge), s, t, {a, a},
                           {rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)}));
      return;
    }
    int left = 1 + static_cast<int>(rng.below(size - 1));
    if (rng.below(2) == 0) {  // series: introduce a middle vertex
      int mid = static_cast<int>(vertices.size());
      vertices.push_back("v" + std::to_string(mid));
      grow(s, mid, left);
      grow(mid, t, size - left);
    } else {  // parallel
      grow(s, t, left);
      grow(s, t, size - left);
    }
  };
  grow(0, 1, leaves);
  return wardrop::make_instance(std::move(vertices), std::move(edges),
                                {wardrop::Commodity{0, 1, 1.0, std::nullopt}},
                                {{"theta1", "theta2"}, {0.5, 0.5}});
}

}  // namespace testutil
