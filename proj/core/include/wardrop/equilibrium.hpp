#pragma once

#include "wardrop/types.hpp"

namespace wardrop {

/// Per-commodity edge flows plus the aggregate load vector derived from them.
struct Flow {
  std::vector<std::vector<double>> by_commodity;  // [commodity][edge]
  std::vector<double> loads;                      // aggregate per edge

  static Flow zeros(int num_commodities, int num_edges);
  void recompute_loads();
};

struct SolveOptions {
  double fw_gap_tol = 1e-9;   // relative Frank-Wolfe duality gap target
  long max_iters = 200000;
  double support_eps = 1e-7;  // active-edge extraction tolerance
  double slope_eps = 1e-9;    // zero-slope regularization in exact solves
  int refine_every = 16;        // attempt an exact support refinement this often
  double refine_accept = 1e-8;  // max residual to accept a refined solution
};

/// Equilibrium flow together with the certificates the support machinery
/// consumes: shortest-path potentials, active-edge sets, total cost and the
/// worst KKT residual.
struct EquilibriumResult {
  Flow flow;
  // potentials[i][v]: shortest-path distance from s_i to v under the realized
  // expected costs, +inf where unreachable through permitted edges
  std::vector<std::vector<double>> potentials;
  std::vector<std::vector<int>> support;  // sorted active edges per commodity
  double cost = 0.0;                      // sum_e x_e c_e(x_e | mu)
  double kkt_residual = 0.0;
  long fw_iterations = 0;
  double fw_gap = 0.0;   // relative duality gap at the returned point
  bool refined = false;  // exact support-restricted solve accepted
};

struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, EquilibriumResult best)
      : std::runtime_error(what), best_iterate(std::move(best)) {}
  EquilibriumResult best_iterate;
};

/// Residual report of the Wardrop/KKT conditions for a flow. All entries are
/// scaled: conservation and negativity relative to max(1, d_i),
/// complementarity relative to 1 + |potential|, the cost identity relative to
/// max(1, |cost|).
struct VerifyReport {
  double conservation = 0.0;
  double nonnegativity = 0.0;
  double complementarity = 0.0;
  double cost_identity = 0.0;
  double max_residual = 0.0;

  bool pass(double tol = 1e-6) const { return max_residual <= tol; }
};

/// Result of solving the support-restricted equality system (potential
/// differences on support edges, conservation, pinned source potentials).
/// The solution is reported as-is: negative flows and beaten potentials are
/// listed, not clamped, because the region machinery needs the violation
/// certificate.
struct SupportSolve {
  Flow flow;  // zero outside the support, possibly negative on it
  std::vector<std::vector<double>> potentials;  // NaN where undefined
  double cost = 0.0;  // sum_i d_i * pi(t_i)
  bool feasible = true;
  std::vector<std::pair<int, int>> negative_flows;   // (commodity, edge)
  std::vector<std::pair<int, int>> cost_violations;  // (commodity, edge)
};

/// Beckmann potential sum_e (slope_e/2 x_e^2 + offset_e x_e) at expected
/// costs. Throws InfeasibleFlow when the flow violates conservation by more
/// than 1e-7 * max(1, d_i).
double beckmann_value(const Instance& inst, const Belief& belief, const Flow& flow);

/// Expected edge costs c_e(load_e | belief).
std::vector<double> expected_costs(const Instance& inst, const Belief& belief,
                                   const std::vector<double>& loads);

/// Each commodity's demand on one cheapest permitted path under fixed edge
/// costs; equal-cost ties resolve to the lexicographically smallest edge
/// sequence. Throws NoPath.
Flow all_or_nothing(const Instance& inst, const std::vector<double>& edge_costs);

/// Shortest-path distances from each s_i under the flow's realized costs.
std::vector<std::vector<double>> shortest_path_potentials(const Instance& inst,
                                                          const Belief& belief,
                                                          const Flow& flow);

/// Active edges per commodity: cost-tight edges (|pi_head - pi_tail - c_e| <=
/// support_eps * (1 + |pi_head|)) plus every flow-carrying edge.
std::vector<std::vector<int>> extract_support(
    const Instance& inst, const Belief& belief, const Flow& flow,
    const std::vector<std::vector<double>>& potentials, double support_eps = 1e-7,
    double flow_eps_rel = 1e-9);

/// Exact solve of the equality system for a fixed support vector via the
/// reduced weighted-Laplacian block system. Zero expected slopes are replaced
/// by slope_eps. Throws SingularSystem when a support does not connect its
/// commodity (an invalid support, not a numerical failure).
SupportSolve solve_on_support(const Instance& inst, const Belief& belief,
                              const std::vector<std::vector<int>>& support,
                              double slope_eps = 1e-9);

VerifyReport verify_wardrop(const Instance& inst, const Belief& belief, const Flow& flow,
                            double tol = 1e-6);

/// Frank-Wolfe with exact line search on the quadratic Beckmann objective,
/// periodically snapped to the exact solution on the extracted support. The
/// returned kkt_residual is verify_wardrop's max residual.
EquilibriumResult solve_wardrop(const Instance& inst, const Belief& belief,
                                const SolveOptions& options = {});

/// Closed-form water-filling equilibrium for a single commodity on parallel
/// links: include links in increasing expected-offset order while the common
/// cost level exceeds the next offset. Zero-slope links cap the level at
/// their offset and absorb the leftover demand. Throws NotParallelLinks.
EquilibriumResult parallel_links_wardrop(const Instance& inst, const Belief& belief);

}  // namespace wardrop
