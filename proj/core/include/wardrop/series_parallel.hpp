#pragma once

#include <variant>

#include "wardrop/types.hpp"

namespace wardrop {

struct GraphIsSeriesParallel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadTerminals : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary decomposition tree; leaves are edges, inner nodes series/parallel
/// compositions. Nodes are stored flat and referenced by index so the tree
/// is copyable and easy to serialize.
struct SpNode {
  enum class Kind { kEdge, kSeries, kParallel };
  Kind kind = Kind::kEdge;
  int edge = -1;  // leaf payload
  int source = -1, target = -1;
  int left = -1, right = -1;
};

struct SpDecomposition {
  std::vector<SpNode> nodes;
  int root = -1;
  std::vector<int> pruned_edges;  // edges off every s-t path, removed up front
};

struct NotSp {
  std::vector<int> kernel_edges;  // the irreducible remainder
  std::vector<int> pruned_edges;
};

using SpResult = std::variant<SpDecomposition, NotSp>;

/// Two-terminal series-parallel recognition by exhaustive series/parallel
/// reduction. Edges lying on no s-t path (by the reachability test) are
/// pruned first and reported. Throws BadTerminals when t is unreachable
/// from s.
SpResult is_series_parallel(const Instance& network, int s, int t);

inline bool sp_ok(const SpResult& r) { return std::holds_alternative<SpDecomposition>(r); }

struct RevelationGuarantee {
  bool guaranteed = false;
  std::vector<std::string> reasons;  // premises that fail, empty if guaranteed
};

/// Full information revelation is optimal for every offset profile iff the
/// instance is single-commodity, offsets-only, and series-parallel.
RevelationGuarantee full_revelation_guarantee(const Instance& inst);

/// Two-state instance on a non-SP network on which full revelation is
/// strictly suboptimal: locates a non-confluent edge b and the six path
/// segments of the embedded Wheatstone, then assigns costs x / 1 / 0 on the
/// segments and a large offset (1e6) off them; only b's offset depends on
/// the state.
struct BraessWitness {
  Instance instance;
  int center_edge = -1;                 // the edge with state-dependent offset
  std::vector<int> x_edges, one_edges;  // slope-1 and offset-1 edges
  std::vector<std::string> notes;       // degenerate segment contractions
};

BraessWitness braess_witness(const Instance& network, int s, int t);

}  // namespace wardrop
