#include "wardrop/support_enum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "wardrop/lp.hpp"
#include "wardrop/rng.hpp"

namespace wardrop {

namespace {
constexpr double kLineEqualTol = 1e-12;
}

std::string SupportVector::key() const {
  std::ostringstream os;
  for (size_t i = 0; i < sets.size(); ++i) {
    if (i) os << '|';
    for (size_t k = 0; k < sets[i].size(); ++k) {
      if (k) os << ',';
      os << sets[i][k];
    }
  }
  return os.str();
}

double SupportRegion::cost_at(double alpha) const {
  if (alpha_hi == alpha_lo) return cost_lo;
  double t = (alpha - alpha_lo) / (alpha_hi - alpha_lo);
  return cost_lo + t * (cost_hi - cost_lo);
}

std::vector<double> SupportRegion::loads_at(double alpha) const {
  if (alpha_hi == alpha_lo) return loads_lo;
  double t = (alpha - alpha_lo) / (alpha_hi - alpha_lo);
  std::vector<double> out(loads_lo.size());
  for (size_t e = 0; e < out.size(); ++e)
    out[e] = loads_lo[e] + t * (loads_hi[e] - loads_lo[e]);
  return out;
}

void SupportRegion::reanchor(double new_lo, double new_hi) {
  double c_lo = cost_at(new_lo), c_hi = cost_at(new_hi);
  std::vector<double> l_lo = loads_at(new_lo), l_hi = loads_at(new_hi);
  alpha_lo = new_lo;
  alpha_hi = new_hi;
  cost_lo = c_lo;
  cost_hi = c_hi;
  loads_lo = std::move(l_lo);
  loads_hi = std::move(l_hi);
}

// ---------------------------------------------------------------------------
// support_region
// ---------------------------------------------------------------------------

std::optional<SupportRegion> support_region(const Instance& inst,
                                            const SupportVector& support) {
  if (inst.num_states() != 2)
    throw RequiresTwoStates("support_region works on the two-state segment");
  if (!inst.offsets_only)
    throw RequiresOffsetsOnly("support_region needs state-independent slopes");
  const int r = inst.num_commodities();
  if (static_cast<int>(support.sets.size()) != r)
    throw BadParameter("support vector size does not match commodity count");

  lp::Problem p;
  const int alpha = p.add_var(0.0, 1.0);
  // x_{e,i} on support edges; pi_{v,i} free with pi_{s_i,i} == 0 eliminated
  std::vector<std::vector<int>> xvar(r, std::vector<int>(inst.num_edges(), -1));
  std::vector<std::vector<int>> pivar(r, std::vector<int>(inst.num_vertices(), -1));
  for (int i = 0; i < r; ++i) {
    for (int e : support.sets[i]) {
      if (!inst.edge_allowed(i, e))
        throw BadParameter("support contains an edge not permitted for its commodity");
      xvar[i][e] = p.add_var(0.0, lp::kInf);
    }
    for (int v = 0; v < inst.num_vertices(); ++v)
      if (v != inst.commodities[i].source) pivar[i][v] = p.add_var(-lp::kInf, lp::kInf);
  }

  // sign * (a_e x_e + b_e(alpha)) contributed to a row's left side
  auto cost_terms = [&](int e, double sign, std::vector<lp::Term>& row, double& rhs) {
    const Edge& ed = inst.edges[e];
    for (int j = 0; j < r; ++j)
      if (xvar[j][e] >= 0) row.push_back({xvar[j][e], sign * ed.slope[0]});
    row.push_back({alpha, sign * (ed.offset[0] - ed.offset[1])});
    rhs -= sign * ed.offset[1];
  };

  for (int i = 0; i < r; ++i) {
    const Commodity& com = inst.commodities[i];
    std::vector<bool> in_support(inst.num_edges(), false);
    for (int e : support.sets[i]) in_support[e] = true;

    for (int e : support.sets[i]) {
      const Edge& ed = inst.edges[e];
      std::vector<lp::Term> row;
      double rhs = 0.0;
      cost_terms(e, 1.0, row, rhs);
      if (pivar[i][ed.tail] >= 0) row.push_back({pivar[i][ed.tail], 1.0});
      if (pivar[i][ed.head] >= 0) row.push_back({pivar[i][ed.head], -1.0});
      p.add_eq(std::move(row), rhs);
    }
    for (int e : inst.commodity_edges(i)) {
      if (in_support[e]) continue;
      const Edge& ed = inst.edges[e];
      std::vector<lp::Term> row;
      double rhs = 0.0;
      cost_terms(e, -1.0, row, rhs);
      if (pivar[i][ed.tail] >= 0) row.push_back({pivar[i][ed.tail], -1.0});
      if (pivar[i][ed.head] >= 0) row.push_back({pivar[i][ed.head], 1.0});
      p.add_le(std::move(row), rhs);
    }

    std::vector<bool> touched(inst.num_vertices(), false);
    for (int e : support.sets[i]) {
      touched[inst.edges[e].tail] = true;
      touched[inst.edges[e].head] = true;
    }
    for (int v = 0; v < inst.num_vertices(); ++v) {
      bool demand_row = v == com.source;
      if (!demand_row && (!touched[v] || v == com.target)) continue;
      std::vector<lp::Term> row;
      for (int e : support.sets[i]) {
        const Edge& ed = inst.edges[e];
        if (ed.tail == v) row.push_back({xvar[i][e], 1.0});
        if (ed.head == v) row.push_back({xvar[i][e], -1.0});
      }
      if (row.empty() && !demand_row) continue;
      p.add_eq(std::move(row), demand_row ? com.demand : 0.0);
    }
  }

  auto read = [&](const lp::Solution& s, double& cost, std::vector<double>& loads) {
    cost = 0.0;
    loads.assign(inst.num_edges(), 0.0);
    for (int i = 0; i < r; ++i) {
      int pt = pivar[i][inst.commodities[i].target];
      cost += inst.commodities[i].demand * (pt >= 0 ? s.z[pt] : 0.0);
      for (int e : support.sets[i]) loads[e] += s.z[xvar[i][e]];
    }
  };

  p.objective[alpha] = 1.0;
  lp::Solution lo_sol = lp::solve(p);
  if (lo_sol.status == lp::Status::kInfeasible) return std::nullopt;
  if (!lo_sol.optimal())
    throw std::runtime_error("support_region LP: " + lp::to_string(lo_sol.status));
  p.objective[alpha] = -1.0;
  lp::Solution hi_sol = lp::solve(p);
  if (!hi_sol.optimal())
    throw std::runtime_error("support_region LP: " + lp::to_string(hi_sol.status));

  SupportRegion region;
  region.support = support;
  region.alpha_lo = lo_sol.z[alpha];
  region.alpha_hi = hi_sol.z[alpha];
  read(lo_sol, region.cost_lo, region.loads_lo);
  read(hi_sol, region.cost_hi, region.loads_hi);
  return region;
}

// ---------------------------------------------------------------------------
// enumerate_supports_two_state
// ---------------------------------------------------------------------------

SupportAtlas enumerate_supports_two_state(const Instance& inst, const EnumOptions& opt) {
  if (inst.num_states() != 2)
    throw RequiresTwoStates("support enumeration works on the two-state segment");
  if (!inst.offsets_only)
    throw RequiresOffsetsOnly("support enumeration needs state-independent slopes");

  SupportAtlas atlas;
  Rng rng(opt.seed);
  std::map<std::string, int> seen;
  std::vector<std::pair<double, double>> work{{0.0, 1.0}};
  const double probe_frac[4] = {0.5, 0.25, 0.75, 0.37};

  int processed = 0;
  while (!work.empty()) {
    if (++processed > 20000)
      throw std::runtime_error("support enumeration did not terminate");
    auto [lo, hi] = work.back();
    work.pop_back();
    if (hi - lo <= opt.boundary_tol) continue;

    bool placed = false;
    for (int attempt = 0; attempt < 4 && !placed; ++attempt) {
      double mid = lo + probe_frac[attempt] * (hi - lo) +
                   (2.0 * rng.uniform01() - 1.0) * 1e-6 * (hi - lo);
      mid = std::clamp(mid, lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo));
      ++atlas.probes;
      EquilibriumResult res = solve_wardrop(inst, make_belief({mid, 1.0 - mid}), opt.solve);
      SupportVector sv{res.support};

      auto it = seen.find(sv.key());
      if (it != seen.end()) {
        const SupportRegion& known = atlas.regions[it->second];
        if (known.alpha_hi < lo - opt.boundary_tol || known.alpha_lo > hi + opt.boundary_tol)
          continue;  // rediscovered far from this interval; try another probe
        work.push_back({lo, std::max(lo, known.alpha_lo)});
        work.push_back({std::min(hi, known.alpha_hi), hi});
        placed = true;
        break;
      }

      atlas.lp_solves += 2;
      auto region = support_region(inst, sv);
      if (!region) continue;
      seen[sv.key()] = static_cast<int>(atlas.regions.size());
      work.push_back({lo, std::max(lo, region->alpha_lo)});
      work.push_back({std::min(hi, region->alpha_hi), hi});
      atlas.regions.push_back(std::move(*region));
      placed = true;
    }
    if (!placed) {
      std::ostringstream os;
      os << "could not bound a support region inside [" << lo << ", " << hi << "]";
      throw std::runtime_error(os.str());
    }
  }

  std::sort(atlas.regions.begin(), atlas.regions.end(),
            [](const SupportRegion& a, const SupportRegion& b) {
              return a.alpha_lo < b.alpha_lo;
            });
  if (atlas.regions.empty()) throw std::runtime_error("empty atlas");

  // snap the cover: outer ends to 0/1, adjacent regions to one shared breakpoint
  const double cover_tol = 1e-6;
  if (std::abs(atlas.regions.front().alpha_lo) > cover_tol ||
      std::abs(atlas.regions.back().alpha_hi - 1.0) > cover_tol)
    throw std::runtime_error("atlas does not cover [0,1]");
  atlas.regions.front().reanchor(0.0, atlas.regions.front().alpha_hi);
  atlas.regions.back().reanchor(atlas.regions.back().alpha_lo, 1.0);
  for (size_t k = 0; k + 1 < atlas.regions.size(); ++k) {
    double gap = atlas.regions[k + 1].alpha_lo - atlas.regions[k].alpha_hi;
    if (std::abs(gap) > cover_tol) {
      std::ostringstream os;
      os << "atlas gap of " << gap << " after alpha=" << atlas.regions[k].alpha_hi;
      throw std::runtime_error(os.str());
    }
    double bp = 0.5 * (atlas.regions[k].alpha_hi + atlas.regions[k + 1].alpha_lo);
    atlas.regions[k].reanchor(atlas.regions[k].alpha_lo, bp);
    atlas.regions[k + 1].reanchor(bp, atlas.regions[k + 1].alpha_hi);
    atlas.breakpoints.push_back(bp);
  }

  for (SupportRegion& region : atlas.regions) {
    double mid = 0.5 * (region.alpha_lo + region.alpha_hi);
    EquilibriumResult res = solve_wardrop(inst, make_belief({mid, 1.0 - mid}), opt.solve);
    region.midpoint_residual = res.kkt_residual;
  }
  return atlas;
}

// ---------------------------------------------------------------------------
// cost profile
// ---------------------------------------------------------------------------

double CostProfile::value_at(double alpha) const {
  if (breakpoints.empty()) return 0.0;
  if (alpha <= breakpoints.front()) return values.front();
  for (size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (alpha <= breakpoints[k + 1]) {
      double w = breakpoints[k + 1] - breakpoints[k];
      double t = w > 0 ? (alpha - breakpoints[k]) / w : 0.0;
      return values[k] + t * (values[k + 1] - values[k]);
    }
  }
  return values.back();
}

CostProfile cost_profile(const SupportAtlas& atlas) {
  CostProfile prof;
  if (atlas.regions.empty()) throw std::runtime_error("empty atlas");
  prof.breakpoints.push_back(atlas.regions.front().alpha_lo);
  prof.values.push_back(atlas.regions.front().cost_lo);
  for (size_t k = 0; k < atlas.regions.size(); ++k) {
    const SupportRegion& region = atlas.regions[k];
    if (k + 1 < atlas.regions.size()) {
      const SupportRegion& next = atlas.regions[k + 1];
      double left = region.cost_hi, right = next.cost_lo;
      if (std::abs(left - right) > 1e-6 * std::max(1.0, std::abs(left))) {
        std::ostringstream os;
        os << "cost profile jumps by " << right - left << " at alpha=" << region.alpha_hi;
        throw DiscontinuityDetected(os.str());
      }
      prof.breakpoints.push_back(region.alpha_hi);
      prof.values.push_back(0.5 * (left + right));
    } else {
      prof.breakpoints.push_back(region.alpha_hi);
      prof.values.push_back(region.cost_hi);
    }
  }
  return prof;
}

bool is_concave(const CostProfile& prof, double tol) {
  double prev_slope = 0.0;
  bool have_prev = false;
  for (size_t k = 0; k + 1 < prof.breakpoints.size(); ++k) {
    double w = prof.breakpoints[k + 1] - prof.breakpoints[k];
    if (w <= 0) continue;
    double slope = (prof.values[k + 1] - prof.values[k]) / w;
    if (have_prev && slope > prev_slope + tol) return false;
    prev_slope = slope;
    have_prev = true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// offset orderings and the parallel-link superset
// ---------------------------------------------------------------------------

namespace {

bool identical_lines(const Edge& a, const Edge& b) {
  for (size_t th = 0; th < a.offset.size(); ++th)
    if (std::abs(a.offset[th] - b.offset[th]) > kLineEqualTol) return false;
  return true;
}

std::vector<int> order_at(const Instance& inst, const std::vector<double>& weights) {
  std::vector<double> val(inst.num_edges(), 0.0);
  for (int e = 0; e < inst.num_edges(); ++e)
    for (size_t th = 0; th < weights.size(); ++th)
      val[e] += weights[th] * inst.edges[e].offset[th];
  std::vector<int> order(inst.num_edges());
  for (int e = 0; e < inst.num_edges(); ++e) order[e] = e;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (val[a] != val[b]) return val[a] < val[b];
    return a < b;
  });
  return order;
}

std::string order_key(const std::vector<int>& order) {
  std::ostringstream os;
  for (int e : order) os << e << ',';
  return os.str();
}

// Is the closed cell {mu in the simplex : offsets non-decreasing along
// `order`} nonempty?
bool ordering_feasible(const Instance& inst, const std::vector<int>& order) {
  const int d = inst.num_states();
  lp::Problem p;
  std::vector<int> mu(d);
  for (int th = 0; th < d; ++th) mu[th] = p.add_var(0.0, 1.0);
  {
    std::vector<lp::Term> row;
    for (int th = 0; th < d; ++th) row.push_back({mu[th], 1.0});
    p.add_eq(std::move(row), 1.0);
  }
  for (size_t k = 0; k + 1 < order.size(); ++k) {
    const Edge& a = inst.edges[order[k]];
    const Edge& b = inst.edges[order[k + 1]];
    std::vector<lp::Term> row;
    for (int th = 0; th < d; ++th) row.push_back({mu[th], a.offset[th] - b.offset[th]});
    p.add_le(std::move(row), 0.0);
  }
  return lp::solve(p).optimal();
}

// Three pairwise non-identical offset hyperplanes through one feasible belief
// violate the d-state non-degeneracy hypothesis.
void check_nondegenerate(const Instance& inst) {
  const int m = inst.num_edges();
  const int d = inst.num_states();
  for (int e = 0; e < m; ++e)
    for (int f = e + 1; f < m; ++f) {
      if (identical_lines(inst.edges[e], inst.edges[f])) continue;
      for (int g = f + 1; g < m; ++g) {
        if (identical_lines(inst.edges[e], inst.edges[g]) ||
            identical_lines(inst.edges[f], inst.edges[g]))
          continue;
        lp::Problem p;
        std::vector<int> mu(d);
        for (int th = 0; th < d; ++th) mu[th] = p.add_var(0.0, 1.0);
        std::vector<lp::Term> sum;
        for (int th = 0; th < d; ++th) sum.push_back({mu[th], 1.0});
        p.add_eq(std::move(sum), 1.0);
        auto equal_row = [&](int x, int y) {
          std::vector<lp::Term> row;
          for (int th = 0; th < d; ++th)
            row.push_back({mu[th], inst.edges[x].offset[th] - inst.edges[y].offset[th]});
          p.add_eq(std::move(row), 0.0);
        };
        equal_row(e, f);
        equal_row(f, g);
        if (lp::solve(p).optimal()) {
          std::ostringstream os;
          os << "offset lines of " << inst.edges[e].id << ", " << inst.edges[f].id
             << ", " << inst.edges[g].id << " meet at a feasible belief";
          throw DegenerateInstance(os.str());
        }
      }
    }
}

// DFS over ordering cells: start at the theta_1 corner, explore flips of
// adjacent non-identical pairs, keep orderings whose cell is nonempty.
std::vector<std::vector<int>> dfs_orderings(const Instance& inst) {
  check_nondegenerate(inst);
  std::vector<std::vector<int>> out;
  std::set<std::string> visited;
  std::vector<double> corner(inst.num_states(), 0.0);
  corner[0] = 1.0;
  std::vector<std::vector<int>> stack{order_at(inst, corner)};
  visited.insert(order_key(stack.back()));
  while (!stack.empty()) {
    std::vector<int> cur = std::move(stack.back());
    stack.pop_back();
    out.push_back(cur);
    for (size_t k = 0; k + 1 < cur.size(); ++k) {
      if (identical_lines(inst.edges[cur[k]], inst.edges[cur[k + 1]])) continue;
      std::vector<int> next = cur;
      std::swap(next[k], next[k + 1]);
      std::string key = order_key(next);
      if (visited.count(key)) continue;
      visited.insert(key);
      if (ordering_feasible(inst, next)) stack.push_back(std::move(next));
    }
  }
  return out;
}

}  // namespace

std::vector<OffsetOrdering> offset_orderings_two_state(const Instance& inst) {
  if (!inst.parallel_links)
    throw NotParallelLinks("offset orderings need a parallel-link instance");
  if (inst.num_states() != 2)
    throw RequiresTwoStates("offset orderings over alpha need two states");

  std::set<double> cuts;
  for (int e = 0; e < inst.num_edges(); ++e)
    for (int f = e + 1; f < inst.num_edges(); ++f) {
      const Edge& a = inst.edges[e];
      const Edge& b = inst.edges[f];
      if (identical_lines(a, b)) continue;
      // b_e(alpha) = off2 + alpha (off1 - off2); intersect the two lines
      double denom = (a.offset[0] - a.offset[1]) - (b.offset[0] - b.offset[1]);
      if (std::abs(denom) < kLineEqualTol) continue;
      double alpha = (b.offset[1] - a.offset[1]) / denom;
      if (alpha > kLineEqualTol && alpha < 1.0 - kLineEqualTol) cuts.insert(alpha);
    }

  std::vector<double> grid{0.0};
  grid.insert(grid.end(), cuts.begin(), cuts.end());
  grid.push_back(1.0);

  std::vector<OffsetOrdering> out;
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    double mid = 0.5 * (grid[k] + grid[k + 1]);
    OffsetOrdering ord;
    ord.alpha_lo = grid[k];
    ord.alpha_hi = grid[k + 1];
    ord.order = order_at(inst, {mid, 1.0 - mid});
    out.push_back(std::move(ord));
  }
  return out;
}

std::vector<SupportVector> enumerate_supports_parallel(const Instance& inst) {
  if (!inst.parallel_links)
    throw NotParallelLinks("support superset needs a parallel-link instance");
  const int r = inst.num_commodities();
  const int m = inst.num_edges();
  if (r == 0) return {};

  // classify links by the set of populations that may use them
  std::map<unsigned, std::vector<int>> classes;
  for (int e = 0; e < m; ++e) {
    unsigned mask = 0;
    for (int i = 0; i < r; ++i)
      if (inst.edge_allowed(i, e)) mask |= 1u << i;
    if (mask) classes[mask].push_back(e);
  }
  std::vector<unsigned> class_masks;
  std::vector<std::vector<int>> class_edges;
  for (auto& [mask, edges] : classes) {
    class_masks.push_back(mask);
    class_edges.push_back(edges);
  }
  const int nc = static_cast<int>(class_masks.size());

  std::vector<std::vector<int>> orderings;
  if (inst.num_states() == 2) {
    for (auto& ord : offset_orderings_two_state(inst)) orderings.push_back(ord.order);
  } else if (inst.num_states() == 1) {
    orderings.push_back(order_at(inst, {1.0}));
  } else {
    orderings = dfs_orderings(inst);
  }

  std::set<std::string> seen;
  std::vector<SupportVector> out;

  for (const auto& order : orderings) {
    std::vector<int> rank(m);
    for (int pos = 0; pos < m; ++pos) rank[order[pos]] = pos;
    std::vector<std::vector<int>> sorted_class = class_edges;
    for (auto& edges : sorted_class)
      std::sort(edges.begin(), edges.end(), [&](int a, int b) { return rank[a] < rank[b]; });

    std::vector<int> prefix(nc, 0);  // flow-carrying prefix length per class
    auto emit = [&]() {
      std::vector<std::vector<unsigned>> choices(r);
      for (int i = 0; i < r; ++i) {
        std::vector<int> usable;
        for (int c = 0; c < nc; ++c)
          if ((class_masks[c] >> i & 1u) && prefix[c] > 0) usable.push_back(c);
        if (usable.empty()) return;  // this combo cannot route population i
        unsigned subsets = 1u << usable.size();
        for (unsigned s = 1; s < subsets; ++s) {
          unsigned class_set = 0;
          for (size_t b = 0; b < usable.size(); ++b)
            if (s >> b & 1u) class_set |= 1u << usable[b];
          choices[i].push_back(class_set);
        }
      }
      std::vector<size_t> idx(r, 0);
      while (true) {
        SupportVector sv;
        sv.sets.resize(r);
        for (int i = 0; i < r; ++i) {
          unsigned pick = choices[i][idx[i]];
          for (int c = 0; c < nc; ++c)
            if (pick >> c & 1u)
              sv.sets[i].insert(sv.sets[i].end(), sorted_class[c].begin(),
                                sorted_class[c].begin() + prefix[c]);
          std::sort(sv.sets[i].begin(), sv.sets[i].end());
        }
        if (seen.insert(sv.key()).second) out.push_back(std::move(sv));
        int level = r - 1;
        while (level >= 0 && ++idx[level] == choices[level].size()) idx[level--] = 0;
        if (level < 0) break;
      }
    };

    // cartesian product of prefix lengths over classes
    std::vector<int> pidx(nc, 0);
    while (true) {
      for (int c = 0; c < nc; ++c) prefix[c] = pidx[c];
      emit();
      int level = nc - 1;
      while (level >= 0 &&
             ++pidx[level] > static_cast<int>(sorted_class[level].size()))
        pidx[level--] = 0;
      if (level < 0) break;
    }
  }
  return out;
}

std::vector<SupportVector> sample_supports(const Instance& inst, int num_beliefs,
                                           std::uint64_t seed, const SolveOptions& opt) {
  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<SupportVector> out;
  for (int k = 0; k < num_beliefs; ++k) {
    Belief mu = make_belief(rng.simplex_point(inst.num_states()));
    EquilibriumResult res = solve_wardrop(inst, mu, opt);
    SupportVector sv{res.support};
    if (seen.insert(sv.key()).second) out.push_back(std::move(sv));
  }
  return out;
}

}  // namespace wardrop
