#include "wardrop/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wardrop/lp.hpp"

namespace wardrop {

namespace {
constexpr double kIssueTol = 1e-12;
}

double SignalingScheme::signal_mass(int sigma) const {
  double m = 0.0;
  for (const auto& row : phi) m += row[sigma];
  return m;
}

std::vector<double> SignalingScheme::posterior(int sigma) const {
  double m = signal_mass(sigma);
  std::vector<double> post(num_states(), 0.0);
  if (m <= kIssueTol) return post;
  for (int th = 0; th < num_states(); ++th) post[th] = phi[th][sigma] / m;
  return post;
}

std::vector<double> SignalingScheme::row_sums() const {
  std::vector<double> sums(num_states(), 0.0);
  for (int th = 0; th < num_states(); ++th)
    for (double v : phi[th]) sums[th] += v;
  return sums;
}

SignalingScheme full_revelation_scheme(const std::vector<double>& prior) {
  const int d = static_cast<int>(prior.size());
  SignalingScheme s;
  s.phi.assign(d, std::vector<double>(d, 0.0));
  for (int th = 0; th < d; ++th) s.phi[th][th] = prior[th];
  return s;
}

SignalingScheme no_signal_scheme(const std::vector<double>& prior) {
  const int d = static_cast<int>(prior.size());
  SignalingScheme s;
  s.phi.assign(d, std::vector<double>(1, 0.0));
  for (int th = 0; th < d; ++th) s.phi[th][0] = prior[th];
  return s;
}

void check_scheme(const Instance& inst, const SignalingScheme& scheme) {
  if (scheme.num_states() != inst.num_states())
    throw BadParameter("scheme state count does not match the instance");
  for (const auto& row : scheme.phi)
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw BadParameter("scheme entries must be non-negative");
  std::vector<double> sums = scheme.row_sums();
  for (int th = 0; th < inst.num_states(); ++th)
    if (std::abs(sums[th] - inst.state_space.prior[th]) > 1e-9) {
      std::ostringstream os;
      os << "scheme row " << th << " sums to " << sums[th] << ", prior is "
         << inst.state_space.prior[th];
      throw BadParameter(os.str());
    }
}

SchemeEvaluation evaluate_scheme(const Instance& inst, const SignalingScheme& scheme,
                                 const SolveOptions& opt) {
  check_scheme(inst, scheme);
  SchemeEvaluation ev;
  for (int sigma = 0; sigma < scheme.num_signals(); ++sigma) {
    double mass = scheme.signal_mass(sigma);
    if (mass <= kIssueTol) continue;
    SignalEvaluation sig;
    sig.signal = sigma;
    sig.mass = mass;
    sig.posterior = scheme.posterior(sigma);
    for (int th = 0; th < scheme.num_states(); ++th)
      sig.phi_column.push_back(scheme.phi[th][sigma]);
    EquilibriumResult res = solve_wardrop(inst, make_belief(sig.posterior), opt);
    sig.cost = res.cost;
    ev.total_cost += mass * sig.cost;
    ev.signals.push_back(std::move(sig));
  }
  return ev;
}

// ---------------------------------------------------------------------------
// the support-indexed LP
// ---------------------------------------------------------------------------

namespace {

struct BlockVars {
  std::vector<int> phi;                    // per state
  std::vector<std::vector<int>> y;         // [commodity][edge], -1 off support
  std::vector<std::vector<int>> pi;        // [commodity][vertex], -1 at s_i
};

// Constraints of one signal block (scaled by the signal probability);
// with mass_one an extra row sum_theta phi = 1 turns the block into a
// standalone feasibility probe for the candidate.
BlockVars add_block(lp::Problem& p, const Instance& inst, const SupportVector& sv,
                    const std::vector<double>& prior, bool mass_one) {
  const int r = inst.num_commodities();
  const int d = inst.num_states();
  BlockVars vars;
  vars.phi.resize(d);
  for (int th = 0; th < d; ++th) vars.phi[th] = p.add_var(0.0, prior[th]);
  vars.y.assign(r, std::vector<int>(inst.num_edges(), -1));
  vars.pi.assign(r, std::vector<int>(inst.num_vertices(), -1));
  for (int i = 0; i < r; ++i) {
    for (int e : sv.sets[i]) {
      if (!inst.edge_allowed(i, e))
        throw BadParameter("candidate support uses an edge not permitted for its commodity");
      vars.y[i][e] = p.add_var(0.0, lp::kInf);
    }
    for (int v = 0; v < inst.num_vertices(); ++v)
      if (v != inst.commodities[i].source)
        vars.pi[i][v] = p.add_var(-lp::kInf, lp::kInf);
  }

  // sign * (a_e y_e + sum_theta phi_theta b_e^theta) added to a row
  auto cost_terms = [&](int e, double sign, std::vector<lp::Term>& row) {
    const Edge& ed = inst.edges[e];
    for (int j = 0; j < r; ++j)
      if (vars.y[j][e] >= 0) row.push_back({vars.y[j][e], sign * ed.slope[0]});
    for (int th = 0; th < d; ++th)
      row.push_back({vars.phi[th], sign * ed.offset[th]});
  };

  for (int i = 0; i < r; ++i) {
    const Commodity& com = inst.commodities[i];
    std::vector<bool> in_support(inst.num_edges(), false);
    for (int e : sv.sets[i]) in_support[e] = true;

    for (int e : sv.sets[i]) {
      const Edge& ed = inst.edges[e];
      std::vector<lp::Term> row;
      cost_terms(e, 1.0, row);
      if (vars.pi[i][ed.tail] >= 0) row.push_back({vars.pi[i][ed.tail], 1.0});
      if (vars.pi[i][ed.head] >= 0) row.push_back({vars.pi[i][ed.head], -1.0});
      p.add_eq(std::move(row), 0.0);
    }
    for (int e : inst.commodity_edges(i)) {
      if (in_support[e]) continue;
      const Edge& ed = inst.edges[e];
      std::vector<lp::Term> row;
      cost_terms(e, -1.0, row);
      if (vars.pi[i][ed.tail] >= 0) row.push_back({vars.pi[i][ed.tail], -1.0});
      if (vars.pi[i][ed.head] >= 0) row.push_back({vars.pi[i][ed.head], 1.0});
      p.add_le(std::move(row), 0.0);
    }

    std::vector<bool> touched(inst.num_vertices(), false);
    for (int e : sv.sets[i]) {
      touched[inst.edges[e].tail] = true;
      touched[inst.edges[e].head] = true;
    }
    for (int v = 0; v < inst.num_vertices(); ++v) {
      bool demand_row = v == com.source;
      if (!demand_row && (!touched[v] || v == com.target)) continue;
      std::vector<lp::Term> row;
      for (int e : sv.sets[i]) {
        const Edge& ed = inst.edges[e];
        if (ed.tail == v) row.push_back({vars.y[i][e], 1.0});
        if (ed.head == v) row.push_back({vars.y[i][e], -1.0});
      }
      if (demand_row) {
        for (int th = 0; th < d; ++th) row.push_back({vars.phi[th], -com.demand});
        p.add_eq(std::move(row), 0.0);
      } else if (!row.empty()) {
        p.add_eq(std::move(row), 0.0);
      }
    }
  }

  if (mass_one) {
    std::vector<lp::Term> row;
    for (int th = 0; th < d; ++th) row.push_back({vars.phi[th], 1.0});
    p.add_eq(std::move(row), 1.0);
  }
  return vars;
}

// Candidates whose block admits no issued signal at all, for the infeasible
// diagnosis.
std::vector<int> empty_candidates(const Instance& inst,
                                  const std::vector<SupportVector>& candidates,
                                  const std::vector<double>& prior) {
  std::vector<int> empty;
  for (size_t k = 0; k < candidates.size(); ++k) {
    lp::Problem p;
    add_block(p, inst, candidates[k], std::vector<double>(prior.size(), 1.0), true);
    if (!lp::solve(p).optimal()) empty.push_back(static_cast<int>(k));
  }
  return empty;
}

}  // namespace

SchemeLpResult optimal_scheme_lp(const Instance& inst,
                                 const std::vector<SupportVector>& candidates,
                                 const std::vector<double>& prior) {
  if (!inst.offsets_only)
    throw RequiresOffsetsOnly("the signaling LP needs state-independent slopes");
  if (static_cast<int>(prior.size()) != inst.num_states())
    throw BadParameter("prior length does not match the state count");
  if (candidates.empty()) throw BadParameter("candidate support list is empty");

  const int r = inst.num_commodities();
  const int d = inst.num_states();
  const int K = static_cast<int>(candidates.size());

  lp::Problem p;
  std::vector<BlockVars> blocks;
  blocks.reserve(K);
  for (const SupportVector& sv : candidates) blocks.push_back(add_block(p, inst, sv, prior, false));

  for (int th = 0; th < d; ++th) {
    std::vector<lp::Term> row;
    for (int k = 0; k < K; ++k) row.push_back({blocks[k].phi[th], 1.0});
    p.add_eq(std::move(row), prior[th]);
  }
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < r; ++i) {
      int pt = blocks[k].pi[i][inst.commodities[i].target];
      if (pt >= 0) p.objective[pt] += inst.commodities[i].demand;
    }

  lp::Solution sol = lp::solve(p);
  if (sol.status == lp::Status::kInfeasible) {
    std::ostringstream os;
    os << "signaling LP infeasible";
    std::vector<int> empty = empty_candidates(inst, candidates, prior);
    if (!empty.empty()) {
      os << "; candidates connecting no belief:";
      for (int k : empty) os << ' ' << k;
    } else {
      os << "; the candidate regions cannot decompose the prior";
    }
    throw LpInfeasible(os.str());
  }
  if (sol.status == lp::Status::kUnbounded)
    throw LpUnbounded("signaling LP unbounded; the potential system admits an unbounded ray");
  if (!sol.optimal())
    throw std::runtime_error("signaling LP: " + lp::to_string(sol.status));

  SchemeLpResult out;
  out.cost = sol.objective;
  out.scheme.phi.assign(d, std::vector<double>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    SchemeLpBlock block;
    block.phi.resize(d);
    for (int th = 0; th < d; ++th) {
      double v = std::max(0.0, sol.z[blocks[k].phi[th]]);
      block.phi[th] = v;
      out.scheme.phi[th][k] = v;
      block.mass += v;
    }
    block.scaled_flows.assign(r, std::vector<double>(inst.num_edges(), 0.0));
    block.scaled_loads.assign(inst.num_edges(), 0.0);
    block.scaled_potentials.assign(r, std::vector<double>(inst.num_vertices(), 0.0));
    for (int i = 0; i < r; ++i) {
      for (int e = 0; e < inst.num_edges(); ++e)
        if (blocks[k].y[i][e] >= 0) {
          double y = sol.z[blocks[k].y[i][e]];
          block.scaled_flows[i][e] = y;
          block.scaled_loads[e] += y;
        }
      for (int v = 0; v < inst.num_vertices(); ++v)
        if (blocks[k].pi[i][v] >= 0)
          block.scaled_potentials[i][v] = sol.z[blocks[k].pi[i][v]];
    }
    if (block.mass > kIssueTol) {
      block.posterior.resize(d);
      for (int th = 0; th < d; ++th) block.posterior[th] = block.phi[th] / block.mass;
      // unscale and verify the recovered equilibrium
      Flow x = Flow::zeros(r, inst.num_edges());
      for (int i = 0; i < r; ++i)
        for (int e = 0; e < inst.num_edges(); ++e)
          x.by_commodity[i][e] = block.scaled_flows[i][e] / block.mass;
      x.recompute_loads();
      block.verify_residual =
          verify_wardrop(inst, make_belief(block.posterior), x).max_residual;
    }
    out.blocks.push_back(std::move(block));
  }
  return out;
}

SignalingScheme prune_scheme(const SignalingScheme& scheme,
                             const std::vector<SupportVector>& signal_supports) {
  const int d = scheme.num_states();
  std::vector<std::vector<double>> cols;  // [signal][state]
  std::vector<SupportVector> sups;
  for (int sigma = 0; sigma < scheme.num_signals(); ++sigma) {
    if (scheme.signal_mass(sigma) <= kIssueTol) continue;
    std::vector<double> col(d);
    for (int th = 0; th < d; ++th) col[th] = scheme.phi[th][sigma];
    cols.push_back(std::move(col));
    if (sigma < static_cast<int>(signal_supports.size()))
      sups.push_back(signal_supports[sigma]);
    else
      sups.push_back({});
  }

  auto nested = [](const SupportVector& a, const SupportVector& b) {
    if (a.sets.size() != b.sets.size() || a.sets.empty()) return false;
    for (size_t i = 0; i < a.sets.size(); ++i)
      if (!std::includes(b.sets[i].begin(), b.sets[i].end(), a.sets[i].begin(),
                         a.sets[i].end()))
        return false;
    return true;
  };
  auto merge_into = [&](size_t from, size_t into) {
    for (int th = 0; th < d; ++th) cols[into][th] += cols[from][th];
    cols.erase(cols.begin() + from);
    sups.erase(sups.begin() + from);
  };

  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < cols.size() && !merged; ++a)
      for (size_t b = 0; b < cols.size() && !merged; ++b) {
        if (a == b) continue;
        if (nested(sups[a], sups[b])) {  // a's supports nest inside b's
          merge_into(a, b);
          merged = true;
        }
      }
  }
  // equal posteriors induce the same equilibrium; merging them is free
  merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < cols.size() && !merged; ++a)
      for (size_t b = a + 1; b < cols.size() && !merged; ++b) {
        double ma = 0, mb = 0;
        for (int th = 0; th < d; ++th) {
          ma += cols[a][th];
          mb += cols[b][th];
        }
        bool same = true;
        for (int th = 0; th < d && same; ++th)
          same = std::abs(cols[a][th] / ma - cols[b][th] / mb) <= 1e-9;
        if (same) {
          for (int th = 0; th < d; ++th) cols[b][th] += cols[a][th];
          cols.erase(cols.begin() + a);
          sups.erase(sups.begin() + a);
          merged = true;
        }
      }
  }

  SignalingScheme out;
  out.phi.assign(d, std::vector<double>(cols.size(), 0.0));
  for (size_t sigma = 0; sigma < cols.size(); ++sigma)
    for (int th = 0; th < d; ++th) out.phi[th][sigma] = cols[sigma][th];
  return out;
}

TwoStateSchemeResult optimal_scheme_two_state(const Instance& inst,
                                              const std::vector<double>& prior,
                                              const EnumOptions& opt) {
  TwoStateSchemeResult out;
  out.atlas = enumerate_supports_two_state(inst, opt);
  std::vector<SupportVector> candidates;
  candidates.reserve(out.atlas.regions.size());
  for (const SupportRegion& region : out.atlas.regions) candidates.push_back(region.support);
  SchemeLpResult lp_res = optimal_scheme_lp(inst, candidates, prior);
  out.cost = lp_res.cost;
  out.scheme = prune_scheme(lp_res.scheme, candidates);
  return out;
}

GridSchemeResult grid_scheme_oracle(const Instance& inst, double prior_alpha,
                                    int grid_points) {
  if (inst.num_states() != 2)
    throw RequiresTwoStates("the grid oracle works on the two-state segment");
  if (grid_points < 2) throw BadParameter("grid needs at least two points");

  std::vector<double> alphas;
  alphas.reserve(grid_points + 2);
  for (int k = 0; k <= grid_points; ++k)
    alphas.push_back(static_cast<double>(k) / grid_points);
  alphas.push_back(prior_alpha);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  const bool waterfill = inst.parallel_links && inst.num_commodities() == 1;
  std::vector<double> cost(alphas.size());
  for (size_t k = 0; k < alphas.size(); ++k) {
    Belief mu = make_belief({alphas[k], 1.0 - alphas[k]});
    cost[k] = waterfill ? parallel_links_wardrop(inst, mu).cost
                        : solve_wardrop(inst, mu).cost;
  }

  size_t prior_idx =
      std::lower_bound(alphas.begin(), alphas.end(), prior_alpha) - alphas.begin();

  GridSchemeResult best;
  best.cost = cost[prior_idx];
  best.alpha1 = best.alpha2 = prior_alpha;
  best.lambda = 1.0;
  for (size_t a = 0; a <= prior_idx; ++a) {
    for (size_t b = prior_idx; b < alphas.size(); ++b) {
      double span = alphas[b] - alphas[a];
      double lam = span > 0 ? (alphas[b] - prior_alpha) / span : 1.0;
      double value = lam * cost[a] + (1.0 - lam) * cost[b];
      if (value < best.cost - 1e-15) {
        best.cost = value;
        best.alpha1 = alphas[a];
        best.alpha2 = alphas[b];
        best.lambda = lam;
      }
    }
  }

  // assemble the two-signal scheme realizing the decomposition
  best.scheme.phi.assign(2, std::vector<double>(2, 0.0));
  best.scheme.phi[0][0] = best.lambda * best.alpha1;
  best.scheme.phi[1][0] = best.lambda * (1.0 - best.alpha1);
  best.scheme.phi[0][1] = (1.0 - best.lambda) * best.alpha2;
  best.scheme.phi[1][1] = (1.0 - best.lambda) * (1.0 - best.alpha2);
  return best;
}

}  // namespace wardrop
