#pragma once

#include "wardrop/support_enum.hpp"

namespace wardrop {

/// Public signaling scheme: phi[theta][sigma] >= 0, rows summing to the
/// prior. A signal is issued when its mass sum_theta phi[theta][sigma] is
/// positive; posteriors are the Bayes updates phi column / mass.
struct SignalingScheme {
  std::vector<std::vector<double>> phi;  // [state][signal]

  int num_states() const { return static_cast<int>(phi.size()); }
  int num_signals() const { return phi.empty() ? 0 : static_cast<int>(phi[0].size()); }
  double signal_mass(int sigma) const;
  std::vector<double> posterior(int sigma) const;
  std::vector<double> row_sums() const;
};

struct SignalEvaluation {
  int signal = 0;
  std::vector<double> phi_column;
  std::vector<double> posterior;
  double mass = 0.0;
  double cost = 0.0;  // equilibrium cost at the posterior
};

struct SchemeEvaluation {
  std::vector<SignalEvaluation> signals;  // issued signals only
  double total_cost = 0.0;                // sum of mass * cost
};

SignalingScheme full_revelation_scheme(const std::vector<double>& prior);
SignalingScheme no_signal_scheme(const std::vector<double>& prior);

/// Throws BadParameter unless phi is non-negative with row sums equal to the
/// instance prior within 1e-9.
void check_scheme(const Instance& inst, const SignalingScheme& scheme);

/// Solves one equilibrium per issued signal; zero-mass signals are skipped
/// (posterior recovery below mass 1e-12 would divide by ~0).
SchemeEvaluation evaluate_scheme(const Instance& inst, const SignalingScheme& scheme,
                                 const SolveOptions& options = {});

/// The support-indexed signaling program: one signal per candidate support
/// vector, variables (phi, scaled flows y, scaled potentials pi), objective
/// sum_sigma sum_i d_i pi(t_i). Zero-mass candidates are feasible as all-zero
/// blocks, so one LP over the whole candidate list subsumes subset
/// enumeration. The demand constraint uses net outflow at s_i.
struct SchemeLpBlock {
  std::vector<double> phi;   // per state
  double mass = 0.0;
  std::vector<double> posterior;                       // empty when not issued
  std::vector<double> scaled_loads;                    // y_e
  std::vector<std::vector<double>> scaled_flows;       // y_{e,i}
  std::vector<std::vector<double>> scaled_potentials;  // pi_{v,i}
  double verify_residual = 0.0;  // unscaled KKT check, issued signals only
};

struct SchemeLpResult {
  SignalingScheme scheme;  // columns aligned with the candidate list
  double cost = 0.0;
  std::vector<SchemeLpBlock> blocks;
};

/// Throws RequiresOffsetsOnly, LpInfeasible (reporting candidates that admit
/// no belief), LpUnbounded.
SchemeLpResult optimal_scheme_lp(const Instance& inst,
                                 const std::vector<SupportVector>& candidates,
                                 const std::vector<double>& prior);

/// Drops zero-mass signals and merges signal pairs whose supports are nested
/// for every commodity (and, as a final sweep, pairs with equal posteriors).
/// Total cost is unchanged by every merge.
SignalingScheme prune_scheme(const SignalingScheme& scheme,
                             const std::vector<SupportVector>& signal_supports);

struct TwoStateSchemeResult {
  SignalingScheme scheme;  // pruned
  double cost = 0.0;
  SupportAtlas atlas;
};

/// Full two-state pipeline: enumerate the atlas, feed its supports to the
/// signaling LP at the given prior, prune.
TwoStateSchemeResult optimal_scheme_two_state(const Instance& inst,
                                              const std::vector<double>& prior,
                                              const EnumOptions& options = {});

/// Independent oracle: equilibrium cost on an alpha grid (plus the prior
/// point), then the cheapest two-point convex decomposition of the prior by
/// brute force over grid pairs. Each grid cost comes from its own
/// equilibrium solve, not from the atlas or the LP.
struct GridSchemeResult {
  SignalingScheme scheme;
  double cost = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0, lambda = 1.0;
};

GridSchemeResult grid_scheme_oracle(const Instance& inst, double prior_alpha,
                                    int grid_points = 10000);

}  // namespace wardrop
