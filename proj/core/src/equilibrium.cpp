#include "wardrop/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adjacency.hpp"

namespace wardrop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest-path tree with deterministic ties: among equal-cost paths the
// lexicographically smaller edge-index sequence wins. Label-correcting to a
// fixpoint; improvements are well-founded because a relaxation either lowers
// the distance or replaces the sequence by a lexicographically smaller one,
// and appending a zero-cost cycle can never produce a smaller sequence.
struct PathTree {
  std::vector<double> dist;
  std::vector<int> pred;                 // incoming edge, -1 at source/unreached
  std::vector<std::vector<int>> seq;     // edge sequence from the source
};

PathTree shortest_paths_lex(const Instance& inst, const std::vector<double>& costs,
                            int source, const std::vector<int>& edge_set) {
  const int n = inst.num_vertices();
  PathTree t;
  t.dist.assign(n, kInf);
  t.pred.assign(n, -1);
  t.seq.assign(n, {});
  t.dist[source] = 0.0;

  bool changed = true;
  while (changed) {
    changed = false;
    for (int e : edge_set) {
      const Edge& ed = inst.edges[e];
      if (t.dist[ed.tail] == kInf) continue;
      double nd = t.dist[ed.tail] + costs[e];
      bool better = false;
      if (nd < t.dist[ed.head]) {
        better = true;
      } else if (nd == t.dist[ed.head]) {
        const auto& cur = t.seq[ed.head];
        const auto& base = t.seq[ed.tail];
        // candidate = base + [e]; lexicographic compare against cur
        size_t k = 0;
        while (k < base.size() && k < cur.size() && base[k] == cur[k]) ++k;
        if (k == cur.size()) {
          better = false;  // cur is a prefix of the candidate
        } else if (k == base.size()) {
          better = e < cur[k];
        } else {
          better = base[k] < cur[k];
        }
      }
      if (better) {
        t.dist[ed.head] = nd;
        t.pred[ed.head] = e;
        t.seq[ed.head] = t.seq[ed.tail];
        t.seq[ed.head].push_back(e);
        changed = true;
      }
    }
  }
  return t;
}

std::vector<double> belief_slopes(const Instance& inst, const Belief& mu) {
  std::vector<double> s(inst.num_edges());
  for (int e = 0; e < inst.num_edges(); ++e)
    s[e] = expected_cost_params(inst.edges[e], mu).slope;
  return s;
}

std::vector<double> belief_offsets(const Instance& inst, const Belief& mu) {
  std::vector<double> o(inst.num_edges());
  for (int e = 0; e < inst.num_edges(); ++e)
    o[e] = expected_cost_params(inst.edges[e], mu).offset;
  return o;
}

double conservation_residual(const Instance& inst, const Flow& flow) {
  double worst = 0.0;
  for (int i = 0; i < inst.num_commodities(); ++i) {
    const Commodity& c = inst.commodities[i];
    std::vector<double> net(inst.num_vertices(), 0.0);
    for (int e = 0; e < inst.num_edges(); ++e) {
      double x = flow.by_commodity[i][e];
      net[inst.edges[e].tail] += x;
      net[inst.edges[e].head] -= x;
    }
    double scale = std::max(1.0, c.demand);
    for (int v = 0; v < inst.num_vertices(); ++v) {
      double want = v == c.source ? c.demand : (v == c.target ? -c.demand : 0.0);
      worst = std::max(worst, std::abs(net[v] - want) / scale);
    }
  }
  return worst;
}

}  // namespace

Flow Flow::zeros(int num_commodities, int num_edges) {
  Flow f;
  f.by_commodity.assign(num_commodities, std::vector<double>(num_edges, 0.0));
  f.loads.assign(num_edges, 0.0);
  return f;
}

void Flow::recompute_loads() {
  if (by_commodity.empty()) return;
  loads.assign(by_commodity[0].size(), 0.0);
  for (const auto& xc : by_commodity)
    for (size_t e = 0; e < xc.size(); ++e) loads[e] += xc[e];
}

double beckmann_value(const Instance& inst, const Belief& mu, const Flow& flow) {
  double res = conservation_residual(inst, flow);
  if (res > 1e-7) {
    std::ostringstream os;
    os << "flow violates conservation, residual " << res;
    throw InfeasibleFlow(os.str());
  }
  double val = 0.0;
  for (int e = 0; e < inst.num_edges(); ++e) {
    CostParams p = expected_cost_params(inst.edges[e], mu);
    double x = flow.loads[e];
    val += 0.5 * p.slope * x * x + p.offset * x;
  }
  return val;
}

std::vector<double> expected_costs(const Instance& inst, const Belief& mu,
                                   const std::vector<double>& loads) {
  std::vector<double> c(inst.num_edges());
  for (int e = 0; e < inst.num_edges(); ++e) {
    CostParams p = expected_cost_params(inst.edges[e], mu);
    c[e] = p.slope * loads[e] + p.offset;
  }
  return c;
}

Flow all_or_nothing(const Instance& inst, const std::vector<double>& costs) {
  Flow f = Flow::zeros(inst.num_commodities(), inst.num_edges());
  for (int i = 0; i < inst.num_commodities(); ++i) {
    const Commodity& com = inst.commodities[i];
    PathTree t = shortest_paths_lex(inst, costs, com.source, inst.commodity_edges(i));
    if (t.dist[com.target] == kInf) {
      std::ostringstream os;
      os << "commodity " << i << ": no path from " << inst.vertices[com.source]
         << " to " << inst.vertices[com.target];
      throw NoPath(os.str());
    }
    for (int v = com.target; v != com.source;) {
      int e = t.pred[v];
      f.by_commodity[i][e] += com.demand;
      v = inst.edges[e].tail;
    }
  }
  f.recompute_loads();
  return f;
}

std::vector<std::vector<double>> shortest_path_potentials(const Instance& inst,
                                                          const Belief& mu,
                                                          const Flow& flow) {
  std::vector<double> costs = expected_costs(inst, mu, flow.loads);
  std::vector<std::vector<double>> pot(inst.num_commodities());
  for (int i = 0; i < inst.num_commodities(); ++i) {
    PathTree t =
        shortest_paths_lex(inst, costs, inst.commodities[i].source, inst.commodity_edges(i));
    pot[i] = std::move(t.dist);
  }
  return pot;
}

std::vector<std::vector<int>> extract_support(const Instance& inst, const Belief& mu,
                                              const Flow& flow,
                                              const std::vector<std::vector<double>>& pot,
                                              double support_eps, double flow_eps_rel) {
  std::vector<double> costs = expected_costs(inst, mu, flow.loads);
  std::vector<std::vector<int>> support(inst.num_commodities());
  for (int i = 0; i < inst.num_commodities(); ++i) {
    double flow_eps = flow_eps_rel * std::max(1.0, inst.commodities[i].demand);
    for (int e : inst.commodity_edges(i)) {
      const Edge& ed = inst.edges[e];
      bool active = false;
      if (pot[i][ed.tail] < kInf && pot[i][ed.head] < kInf) {
        double gap = pot[i][ed.head] - pot[i][ed.tail] - costs[e];
        active = std::abs(gap) <= support_eps * (1.0 + std::abs(pot[i][ed.head]));
      }
      if (!active && flow.by_commodity[i][e] > flow_eps) active = true;
      if (active) support[i].push_back(e);
    }
  }
  return support;
}

SupportSolve solve_on_support(const Instance& inst, const Belief& mu,
                              const std::vector<std::vector<int>>& support,
                              double slope_eps) {
  const int r = inst.num_commodities();
  const int n = inst.num_vertices();
  if (static_cast<int>(support.size()) != r)
    throw BadParameter("support vector must have one edge set per commodity");

  std::vector<double> slopes = belief_slopes(inst, mu);
  std::vector<double> offsets = belief_offsets(inst, mu);
  for (double& s : slopes) s = std::max(s, slope_eps);

  // unknown layout per commodity: x_{e,i} on support edges, pi_{v,i} on
  // support-incident vertices except s_i (pinned to 0)
  std::vector<std::vector<int>> xvar(r), pivar(r);
  int num_unknowns = 0;
  std::vector<std::vector<int>> touched(r);  // vertices of V_i
  for (int i = 0; i < r; ++i) {
    const Commodity& com = inst.commodities[i];
    xvar[i].assign(inst.num_edges(), -1);
    pivar[i].assign(n, -1);
    for (int e : support[i]) {
      if (!inst.edge_allowed(i, e))
        throw BadParameter("support contains an edge not permitted for its commodity");
      if (xvar[i][e] >= 0) continue;
      xvar[i][e] = num_unknowns++;
    }
    std::vector<bool> in_vi(n, false);
    in_vi[com.source] = in_vi[com.target] = true;
    for (int e : support[i]) {
      in_vi[inst.edges[e].tail] = true;
      in_vi[inst.edges[e].head] = true;
    }
    for (int v = 0; v < n; ++v)
      if (in_vi[v]) touched[i].push_back(v);

    // undirected connectivity of (V_i, A_i); a disconnected support cannot
    // route the commodity and leaves the system rank-deficient
    std::vector<int> comp(n, -1);
    std::vector<int> stack{com.source};
    comp[com.source] = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : support[i]) {
        const Edge& ed = inst.edges[e];
        int other = -1;
        if (ed.tail == v) other = ed.head;
        if (ed.head == v) other = ed.tail;
        if (other >= 0 && comp[other] < 0) {
          comp[other] = 0;
          stack.push_back(other);
        }
      }
    }
    for (int v : touched[i])
      if (comp[v] < 0) {
        std::ostringstream os;
        os << "support of commodity " << i << " does not connect " << inst.vertices[v];
        throw SingularSystem(os.str());
      }
    for (int v : touched[i])
      if (v != com.source) pivar[i][v] = num_unknowns++;
  }

  // rows: potential equation per support edge, conservation per interior
  // vertex of V_i, demand (net outflow) at s_i
  int num_rows = 0;
  for (int i = 0; i < r; ++i)
    num_rows += static_cast<int>(support[i].size()) +
                static_cast<int>(touched[i].size()) - 1;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_rows, num_unknowns);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(num_rows);
  int row = 0;
  for (int i = 0; i < r; ++i) {
    const Commodity& com = inst.commodities[i];
    for (int e : support[i]) {
      const Edge& ed = inst.edges[e];
      for (int j = 0; j < r; ++j)
        if (xvar[j][e] >= 0) A(row, xvar[j][e]) += slopes[e];
      if (pivar[i][ed.head] >= 0) A(row, pivar[i][ed.head]) -= 1.0;
      if (pivar[i][ed.tail] >= 0) A(row, pivar[i][ed.tail]) += 1.0;
      b(row) = -offsets[e];
      ++row;
    }
    for (int v : touched[i]) {
      if (v == com.target) continue;
      for (int e : support[i]) {
        const Edge& ed = inst.edges[e];
        if (ed.tail == v) A(row, xvar[i][e]) += 1.0;
        if (ed.head == v) A(row, xvar[i][e]) -= 1.0;
      }
      b(row) = v == com.source ? com.demand : 0.0;
      ++row;
    }
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd z = cod.solve(b);
  z += cod.solve(b - A * z);  // one step of residual correction

  double scale = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  double resid = b.size() ? (A * z - b).cwiseAbs().maxCoeff() : 0.0;
  if (!z.allFinite() || resid > 1e-7 * scale) {
    std::ostringstream os;
    os << "support equality system is inconsistent (residual " << resid << ")";
    throw SingularSystem(os.str());
  }

  SupportSolve out;
  out.flow = Flow::zeros(r, inst.num_edges());
  out.potentials.assign(r, std::vector<double>(n, kNaN));
  for (int i = 0; i < r; ++i) {
    const Commodity& com = inst.commodities[i];
    for (int e : support[i]) out.flow.by_commodity[i][e] = z(xvar[i][e]);
    out.potentials[i][com.source] = 0.0;
    for (int v : touched[i])
      if (pivar[i][v] >= 0) out.potentials[i][v] = z(pivar[i][v]);
    out.cost += com.demand * out.potentials[i][com.target];
  }
  out.flow.recompute_loads();

  // feasibility report: the two violation types of the region polytope
  std::vector<double> costs = expected_costs(inst, mu, out.flow.loads);
  for (int i = 0; i < r; ++i) {
    double neg_tol = 1e-9 * std::max(1.0, inst.commodities[i].demand);
    for (int e : support[i])
      if (out.flow.by_commodity[i][e] < -neg_tol) out.negative_flows.emplace_back(i, e);
    std::vector<bool> in_support(inst.num_edges(), false);
    for (int e : support[i]) in_support[e] = true;
    for (int e : inst.commodity_edges(i)) {
      if (in_support[e]) continue;
      const Edge& ed = inst.edges[e];
      double pu = out.potentials[i][ed.tail], pv = out.potentials[i][ed.head];
      if (std::isnan(pu) || std::isnan(pv)) continue;
      if (costs[e] < (pv - pu) - 1e-9 * (1.0 + std::abs(pv)))
        out.cost_violations.emplace_back(i, e);
    }
  }
  out.feasible = out.negative_flows.empty() && out.cost_violations.empty();
  return out;
}

VerifyReport verify_wardrop(const Instance& inst, const Belief& mu, const Flow& flow,
                            double tol) {
  VerifyReport rep;
  rep.conservation = conservation_residual(inst, flow);
  std::vector<double> costs = expected_costs(inst, mu, flow.loads);
  auto pot = shortest_path_potentials(inst, mu, flow);

  double total_cost = 0.0;
  for (int e = 0; e < inst.num_edges(); ++e) total_cost += flow.loads[e] * costs[e];
  double potential_cost = 0.0;

  for (int i = 0; i < inst.num_commodities(); ++i) {
    const Commodity& com = inst.commodities[i];
    double dscale = std::max(1.0, com.demand);
    if (pot[i][com.target] == kInf) {
      rep.complementarity = std::max(rep.complementarity, 1.0);
      continue;
    }
    potential_cost += com.demand * pot[i][com.target];
    for (int e : inst.commodity_edges(i)) {
      double x = flow.by_commodity[i][e];
      rep.nonnegativity = std::max(rep.nonnegativity, -x / dscale);
      if (x <= 0) continue;
      const Edge& ed = inst.edges[e];
      if (pot[i][ed.head] == kInf || pot[i][ed.tail] == kInf) {
        rep.complementarity = std::max(rep.complementarity, 1.0);
        continue;
      }
      double slack = costs[e] - (pot[i][ed.head] - pot[i][ed.tail]);
      double gap = std::max(0.0, slack) / (1.0 + std::abs(pot[i][ed.head]));
      rep.complementarity = std::max(rep.complementarity, std::min(x / dscale, gap));
    }
    // flow outside the permitted set is a hard violation
    for (int e = 0; e < inst.num_edges(); ++e)
      if (!inst.edge_allowed(i, e) && std::abs(flow.by_commodity[i][e]) > 1e-12 * dscale)
        rep.nonnegativity = std::max(rep.nonnegativity, 1.0);
  }
  rep.cost_identity =
      std::abs(total_cost - potential_cost) / std::max(1.0, std::abs(total_cost));
  rep.max_residual = std::max({rep.conservation, rep.nonnegativity, rep.complementarity,
                               rep.cost_identity});
  (void)tol;
  return rep;
}

namespace {

EquilibriumResult assemble_result(const Instance& inst, const Belief& mu, Flow flow,
                                  const SolveOptions& opt, long iters, bool refined) {
  EquilibriumResult res;
  res.flow = std::move(flow);
  res.potentials = shortest_path_potentials(inst, mu, res.flow);
  res.support = extract_support(inst, mu, res.flow, res.potentials, opt.support_eps);
  std::vector<double> costs = expected_costs(inst, mu, res.flow.loads);
  res.cost = 0.0;
  for (int e = 0; e < inst.num_edges(); ++e) res.cost += res.flow.loads[e] * costs[e];
  res.kkt_residual = verify_wardrop(inst, mu, res.flow).max_residual;
  res.fw_iterations = iters;
  res.refined = refined;
  if (inst.num_commodities() > 0) {
    Flow y = all_or_nothing(inst, costs);
    double gap = 0.0;
    for (int e = 0; e < inst.num_edges(); ++e)
      gap += costs[e] * (res.flow.loads[e] - y.loads[e]);
    res.fw_gap = gap / std::max(1.0, std::abs(beckmann_value(inst, mu, res.flow)));
  }
  return res;
}

// Try to snap the iterate to the exact equilibrium on its extracted support.
bool try_refine(const Instance& inst, const Belief& mu, const Flow& x,
                const SolveOptions& opt, Flow& refined_out) {
  auto pot = shortest_path_potentials(inst, mu, x);
  // Cost-tight edges only (crumb flows on abandoned edges must not leak into
  // the candidate) over a widening tolerance ladder: mid-run iterates carry
  // O(gap) slack on true support edges, and the KKT check rejects any
  // too-loose candidate, so coarse rungs are safe.
  std::string prev_key;
  for (double eps : {opt.support_eps, 1e-5, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2}) {
    if (eps < opt.support_eps) continue;
    auto support = extract_support(inst, mu, x, pot, eps, kInf);
    std::string key;
    for (const auto& set : support) {
      for (int e : set) key += std::to_string(e) + ',';
      key += '|';
    }
    if (key == prev_key) continue;
    prev_key = std::move(key);
    bool connected = true;
    for (int i = 0; i < inst.num_commodities() && connected; ++i) {
      auto reach = detail::reachable_from(inst, inst.commodities[i].source, support[i]);
      connected = reach[inst.commodities[i].target];
    }
    if (!connected) continue;
    SupportSolve sol;
    try {
      sol = solve_on_support(inst, mu, support, opt.slope_eps);
    } catch (const SingularSystem&) {
      continue;
    }
    if (!sol.negative_flows.empty()) continue;
    Flow cand = std::move(sol.flow);
    for (auto& xc : cand.by_commodity)
      for (double& v : xc)
        if (v < 0) v = 0.0;  // sub-tolerance negatives from the linear solve
    cand.recompute_loads();
    if (verify_wardrop(inst, mu, cand).max_residual <= opt.refine_accept) {
      refined_out = std::move(cand);
      return true;
    }
  }
  return false;
}

}  // namespace

EquilibriumResult solve_wardrop(const Instance& inst, const Belief& mu,
                                const SolveOptions& opt) {
  if (inst.num_commodities() == 0)
    return assemble_result(inst, mu, Flow::zeros(0, inst.num_edges()), opt, 0, true);

  std::vector<double> slopes = belief_slopes(inst, mu);
  std::vector<double> zero_loads(inst.num_edges(), 0.0);
  Flow x = all_or_nothing(inst, expected_costs(inst, mu, zero_loads));

  Flow best = x;
  double best_gap = kInf;
  for (long it = 0; it < opt.max_iters; ++it) {
    std::vector<double> costs = expected_costs(inst, mu, x.loads);
    Flow y = all_or_nothing(inst, costs);
    double gap = 0.0;
    for (int e = 0; e < inst.num_edges(); ++e) gap += costs[e] * (x.loads[e] - y.loads[e]);
    double rel_gap = gap / std::max(1.0, std::abs(beckmann_value(inst, mu, x)));
    if (rel_gap < best_gap) {
      best_gap = rel_gap;
      best = x;
    }

    bool try_now = rel_gap <= opt.fw_gap_tol || it == 2 || it == 5 ||
                   (it % opt.refine_every) == opt.refine_every - 1;
    if (it >= 1 && try_now) {
      Flow refined;
      if (try_refine(inst, mu, x, opt, refined))
        return assemble_result(inst, mu, std::move(refined), opt, it + 1, true);
    }
    if (rel_gap <= opt.fw_gap_tol)
      return assemble_result(inst, mu, std::move(x), opt, it + 1, false);

    // exact line search on the quadratic objective
    double num = 0.0, denom = 0.0;
    for (int e = 0; e < inst.num_edges(); ++e) {
      double delta = y.loads[e] - x.loads[e];
      num += costs[e] * delta;
      denom += slopes[e] * delta * delta;
    }
    double t = denom > 0 ? std::clamp(-num / denom, 0.0, 1.0) : 1.0;
    if (t == 0.0) t = 1e-3;  // degenerate direction, nudge to escape
    for (int i = 0; i < inst.num_commodities(); ++i)
      for (int e = 0; e < inst.num_edges(); ++e)
        x.by_commodity[i][e] += t * (y.by_commodity[i][e] - x.by_commodity[i][e]);
    x.recompute_loads();
  }
  throw NonConvergence(
      "frank-wolfe did not reach the requested gap",
      assemble_result(inst, mu, std::move(best), opt, opt.max_iters, false));
}

EquilibriumResult parallel_links_wardrop(const Instance& inst, const Belief& mu) {
  if (!inst.parallel_links || inst.num_commodities() != 1)
    throw NotParallelLinks("parallel_links_wardrop needs a parallel-link single-commodity instance");
  const Commodity& com = inst.commodities[0];
  if (inst.edges.empty() || inst.edges[0].tail != com.source ||
      inst.edges[0].head != com.target)
    throw NotParallelLinks("commodity endpoints do not match the common vertex pair");

  std::vector<int> edges = inst.commodity_edges(0);
  if (edges.empty()) throw NoPath("commodity has no permitted links");
  std::vector<double> slopes = belief_slopes(inst, mu);
  std::vector<double> offsets = belief_offsets(inst, mu);

  std::sort(edges.begin(), edges.end(), [&](int a, int b) {
    if (offsets[a] != offsets[b]) return offsets[a] < offsets[b];
    return a < b;
  });

  // cap imposed by the cheapest zero-slope link, if any
  double cap = kInf;
  for (int e : edges)
    if (slopes[e] == 0.0) cap = std::min(cap, offsets[e]);

  // water-fill over positive-slope links in offset order
  double sum_inv = 0.0, sum_ratio = 0.0;
  double level = kInf;
  std::vector<int> included;
  for (int e : edges) {
    if (slopes[e] == 0.0) continue;
    if (sum_inv > 0.0) {
      double lvl = (com.demand + sum_ratio) / sum_inv;
      if (lvl <= offsets[e]) break;  // next link too expensive, level settled
    }
    included.push_back(e);
    sum_inv += 1.0 / slopes[e];
    sum_ratio += offsets[e] / slopes[e];
  }
  if (sum_inv > 0.0) level = (com.demand + sum_ratio) / sum_inv;

  Flow flow = Flow::zeros(1, inst.num_edges());
  if (level <= cap) {
    for (int e : included) flow.by_commodity[0][e] = (level - offsets[e]) / slopes[e];
  } else {
    // zero-slope links pin the level at their offset and absorb the leftover
    level = cap;
    double routed = 0.0;
    for (int e : included) {
      double x = std::max(0.0, (level - offsets[e]) / slopes[e]);
      flow.by_commodity[0][e] = x;
      routed += x;
    }
    std::vector<int> sinks;
    for (int e : edges)
      if (slopes[e] == 0.0 && offsets[e] <= cap + 1e-12 * (1.0 + std::abs(cap)))
        sinks.push_back(e);
    double leftover = com.demand - routed;
    for (int e : sinks) flow.by_commodity[0][e] = leftover / sinks.size();
  }
  flow.recompute_loads();

  SolveOptions opt;
  EquilibriumResult res = assemble_result(inst, mu, std::move(flow), opt, 0, true);
  return res;
}

}  // namespace wardrop
