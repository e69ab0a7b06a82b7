#pragma once

#include <cstdint>
#include <optional>

#include "wardrop/equilibrium.hpp"
#include "wardrop/types.hpp"

namespace wardrop {

struct DiscontinuityDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One active-edge set per commodity, canonical form: sorted edge indices.
struct SupportVector {
  std::vector<std::vector<int>> sets;

  bool operator==(const SupportVector&) const = default;
  /// Stable string key for hashing and set-valued equality.
  std::string key() const;
};

/// Maximal belief interval on which the equilibrium support stays fixed.
/// Two-state beliefs are parameterized by alpha = mu_{theta1}; equilibrium
/// cost and aggregate loads are affine in alpha across the region, anchored
/// at the interval ends.
struct SupportRegion {
  SupportVector support;
  double alpha_lo = 0.0, alpha_hi = 1.0;
  double cost_lo = 0.0, cost_hi = 0.0;
  std::vector<double> loads_lo, loads_hi;
  double midpoint_residual = 0.0;  // kkt residual of the midpoint verification

  double cost_at(double alpha) const;
  std::vector<double> loads_at(double alpha) const;
  /// Move an interval end, re-anchoring the affine cost/load maps.
  void reanchor(double new_lo, double new_hi);
};

/// Ordered cover of [0,1] by support regions: the piecewise-linear C(alpha).
struct SupportAtlas {
  std::vector<SupportRegion> regions;  // sorted by alpha_lo, interiors disjoint
  std::vector<double> breakpoints;     // interior region boundaries
  int lp_solves = 0;
  int probes = 0;
};

struct EnumOptions {
  double boundary_tol = 1e-10;
  std::uint64_t seed = 42;
  SolveOptions solve;
};

/// Tight alpha-interval of beliefs whose equilibrium support equals
/// `support`: builds the polytope over (alpha, x, pi) and solves two LPs,
/// minimizing and maximizing alpha. Returns nullopt when the polytope is
/// empty. Requires two states and an offsets-only instance.
std::optional<SupportRegion> support_region(const Instance& inst,
                                            const SupportVector& support);

/// All equilibrium supports over the belief segment: solve at an interior
/// probe (midpoint plus a seeded jitter), bound its region, recurse on the
/// flanks. Region midpoints are re-solved and KKT-verified.
SupportAtlas enumerate_supports_two_state(const Instance& inst,
                                          const EnumOptions& options = {});

/// Continuous piecewise-linear equilibrium cost over alpha, read off an
/// atlas. Throws DiscontinuityDetected if adjacent regions disagree at a
/// breakpoint by more than 1e-6: that signals an enumeration bug.
struct CostProfile {
  std::vector<double> breakpoints;  // 0 = first, 1 = last
  std::vector<double> values;

  double value_at(double alpha) const;
};

CostProfile cost_profile(const SupportAtlas& atlas);

/// True iff consecutive profile slopes are non-increasing within tol.
bool is_concave(const CostProfile& profile, double tol = 1e-9);

/// Ranking of parallel links by expected offset, per subinterval of [0,1].
struct OffsetOrdering {
  double alpha_lo = 0.0, alpha_hi = 1.0;
  std::vector<int> order;  // edge indices, non-decreasing offset
};

/// Intersect the pairwise offset lines, split [0,1] at the crossing
/// abscissas, read one ordering per subinterval. Identical lines stay glued
/// in edge-index order.
std::vector<OffsetOrdering> offset_orderings_two_state(const Instance& inst);

/// Superset of all supports of Wardrop equilibria on a parallel-link
/// instance with r populations and d states. Per offset-ordering cell:
/// links are classified by accessing-population subsets, flow-carrying sets
/// are cheapest-offset prefixes per class, and each population picks the
/// classes it uses. For d > 2 the ordering cells are traversed by DFS over
/// adjacent-pair flips with an LP feasibility test per ordering; three
/// non-identical offset lines meeting at a feasible belief raise
/// DegenerateInstance.
std::vector<SupportVector> enumerate_supports_parallel(const Instance& inst);

/// Distinct solver supports at seeded random beliefs (used to seed LP
/// candidates on instances without an enumeration routine).
std::vector<SupportVector> sample_supports(const Instance& inst, int num_beliefs,
                                           std::uint64_t seed,
                                           const SolveOptions& options = {});

}  // namespace wardrop
