#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wardrop {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct BadParameter : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotADistribution : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, int line_no = -1)
      : std::runtime_error(what), line(line_no) {}
  int line;
};
struct MissingField : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoPath : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleFlow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotParallelLinks : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RequiresTwoStates : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RequiresOffsetsOnly : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LpInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LpUnbounded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Finite state space with its public prior. States are addressed by index
/// everywhere; names are kept for I/O only.
struct StateSpace {
  std::vector<std::string> states;
  std::vector<double> prior;

  int num_states() const { return static_cast<int>(states.size()); }
};

/// Directed edge with one affine cost a*x + b per state. Slopes may differ
/// across states (needed for the general stochastic-affine instances); the
/// structural algorithms that require state-independent slopes gate on
/// Instance::offsets_only.
struct Edge {
  std::string id;
  int tail = -1;
  int head = -1;
  std::vector<double> slope;   // one entry per state, >= 0
  std::vector<double> offset;  // one entry per state, >= 0
};

/// Player population routing `demand` units from source to target. An empty
/// allowed_edges means the whole edge set is permitted.
struct Commodity {
  int source = -1;
  int target = -1;
  double demand = 0.0;
  std::optional<std::vector<int>> allowed_edges;  // sorted edge indices
};

/// A point of the belief simplex, in state order. Construct via make_belief;
/// weights are validated, never renormalized.
struct Belief {
  std::vector<double> weights;

  double operator[](int theta) const { return weights[theta]; }
  int num_states() const { return static_cast<int>(weights.size()); }
};

/// A Bayesian network congestion game: directed multigraph, commodities,
/// state space with prior, per-state affine edge costs.
///
/// Treat instances as immutable after construction; all operations on them
/// are pure. The derived flags are computed by make_instance (or
/// refresh_derived_flags after manual edits).
struct Instance {
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<Commodity> commodities;
  StateSpace state_space;

  // true iff every edge has identical slopes across states (tol 1e-12)
  bool offsets_only = false;
  // true iff every edge runs tail->head of one common vertex pair
  bool parallel_links = false;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_commodities() const { return static_cast<int>(commodities.size()); }
  int num_states() const { return state_space.num_states(); }

  /// Index of a vertex name, -1 if absent.
  int vertex_index(const std::string& name) const;
  /// Index of an edge id, -1 if absent.
  int edge_index(const std::string& id) const;

  /// Edge indices commodity i may use (whitelist, or all edges).
  std::vector<int> commodity_edges(int i) const;
  /// True if commodity i may use edge e.
  bool edge_allowed(int i, int e) const;

  void refresh_derived_flags();
};

/// Expected slope/offset of an edge under a belief:
/// c_e(x | mu) = slope * x + offset with slope = sum_th mu_th a_e^th etc.
struct CostParams {
  double slope = 0.0;
  double offset = 0.0;
};

/// Outcome of validate_instance. `violations` empty means the instance is
/// accepted by every solver in this library.
struct ValidationReport {
  std::vector<std::string> violations;
  bool offsets_only = false;
  bool parallel_links = false;
  std::vector<int> zero_slope_edges;  // edges with a zero slope in some state

  bool valid() const { return violations.empty(); }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Validates and wraps a weight vector. Throws NotADistribution if an entry
/// is negative or the sum deviates from 1 by more than 1e-9.
Belief make_belief(std::vector<double> weights);

/// Belief putting all mass on one state.
Belief point_mass(int num_states, int theta);

CostParams expected_cost_params(const Edge& edge, const Belief& belief);

/// Assembles an instance and computes the derived flags. Throws BadParameter
/// only on structurally unrepresentable input (bad indices, wrong per-state
/// vector lengths); everything else is left for validate_instance to report.
Instance make_instance(std::vector<std::string> vertices, std::vector<Edge> edges,
                       std::vector<Commodity> commodities, StateSpace states);

/// Non-throwing checker: reports self-loops, negative parameters, invalid
/// prior, unreachable targets, and lists zero-slope edges (those get
/// epsilon-regularized by the exact support solvers).
ValidationReport validate_instance(const Instance& instance);

}  // namespace wardrop
