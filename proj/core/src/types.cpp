#include "wardrop/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "adjacency.hpp"

namespace wardrop {

namespace {
constexpr double kSlopeEqualTol = 1e-12;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace

int Instance::vertex_index(const std::string& name) const {
  for (int v = 0; v < num_vertices(); ++v)
    if (vertices[v] == name) return v;
  return -1;
}

int Instance::edge_index(const std::string& id) const {
  for (int e = 0; e < num_edges(); ++e)
    if (edges[e].id == id) return e;
  return -1;
}

std::vector<int> Instance::commodity_edges(int i) const {
  const auto& c = commodities[i];
  if (c.allowed_edges) return *c.allowed_edges;
  std::vector<int> all(num_edges());
  for (int e = 0; e < num_edges(); ++e) all[e] = e;
  return all;
}

bool Instance::edge_allowed(int i, int e) const {
  const auto& c = commodities[i];
  if (!c.allowed_edges) return true;
  return std::binary_search(c.allowed_edges->begin(), c.allowed_edges->end(), e);
}

void Instance::refresh_derived_flags() {
  offsets_only = true;
  for (const Edge& e : edges) {
    for (size_t th = 1; th < e.slope.size(); ++th) {
      if (std::abs(e.slope[th] - e.slope[0]) > kSlopeEqualTol) {
        offsets_only = false;
        break;
      }
    }
    if (!offsets_only) break;
  }
  parallel_links = !edges.empty();
  for (const Edge& e : edges) {
    if (e.tail != edges[0].tail || e.head != edges[0].head) {
      parallel_links = false;
      break;
    }
  }
}

Belief make_belief(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw NotADistribution("belief entry negative or not finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "belief weights sum to " << sum << ", expected 1";
    throw NotADistribution(os.str());
  }
  return Belief{std::move(weights)};
}

Belief point_mass(int num_states, int theta) {
  std::vector<double> w(num_states, 0.0);
  w.at(theta) = 1.0;
  return Belief{std::move(w)};
}

CostParams expected_cost_params(const Edge& edge, const Belief& belief) {
  CostParams p;
  for (size_t th = 0; th < belief.weights.size(); ++th) {
    p.slope += belief.weights[th] * edge.slope[th];
    p.offset += belief.weights[th] * edge.offset[th];
  }
  return p;
}

Instance make_instance(std::vector<std::string> vertices, std::vector<Edge> edges,
                       std::vector<Commodity> commodities, StateSpace states) {
  const int n = static_cast<int>(vertices.size());
  const int m = static_cast<int>(edges.size());
  const int d = states.num_states();
  if (d < 1) throw BadParameter("state space must contain at least one state");
  if (static_cast<int>(states.prior.size()) != d)
    throw BadParameter("prior length does not match number of states");
  for (const Edge& e : edges) {
    if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n)
      throw BadParameter("edge endpoint index out of range: " + e.id);
    if (static_cast<int>(e.slope.size()) != d || static_cast<int>(e.offset.size()) != d)
      throw BadParameter("edge cost vectors must have one entry per state: " + e.id);
  }
  for (Commodity& c : commodities) {
    if (c.source < 0 || c.source >= n || c.target < 0 || c.target >= n)
      throw BadParameter("commodity endpoint index out of range");
    if (c.allowed_edges) {
      for (int e : *c.allowed_edges)
        if (e < 0 || e >= m) throw BadParameter("whitelist edge index out of range");
      std::sort(c.allowed_edges->begin(), c.allowed_edges->end());
      c.allowed_edges->erase(
          std::unique(c.allowed_edges->begin(), c.allowed_edges->end()),
          c.allowed_edges->end());
    }
  }
  Instance inst;
  inst.vertices = std::move(vertices);
  inst.edges = std::move(edges);
  inst.commodities = std::move(commodities);
  inst.state_space = std::move(states);
  inst.refresh_derived_flags();
  return inst;
}

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto flag = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  std::set<std::string> state_names(inst.state_space.states.begin(),
                                    inst.state_space.states.end());
  if (static_cast<int>(state_names.size()) != inst.num_states())
    flag("duplicate state identifiers");
  double prior_sum = 0.0;
  bool prior_ok = true;
  for (double p : inst.state_space.prior) {
    if (!std::isfinite(p) || p < 0.0) prior_ok = false;
    prior_sum += p;
  }
  if (!prior_ok)
    flag("prior has a negative or non-finite entry");
  else if (std::abs(prior_sum - 1.0) > 1e-12)
    flag("prior does not sum to 1");

  std::set<std::string> edge_ids;
  for (int e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edges[e];
    if (!edge_ids.insert(ed.id).second) flag("duplicate edge id: " + ed.id);
    if (ed.tail == ed.head) flag("self-loop rejected: " + ed.id);
    for (int th = 0; th < inst.num_states(); ++th) {
      if (!finite_nonneg(ed.slope[th])) flag("negative or non-finite slope on " + ed.id);
      if (!finite_nonneg(ed.offset[th])) flag("negative or non-finite offset on " + ed.id);
    }
    double min_slope = *std::min_element(ed.slope.begin(), ed.slope.end());
    if (min_slope == 0.0) rep.zero_slope_edges.push_back(e);
  }

  for (int i = 0; i < inst.num_commodities(); ++i) {
    const Commodity& c = inst.commodities[i];
    std::ostringstream who;
    who << "commodity " << i;
    if (!(c.demand > 0.0) || !std::isfinite(c.demand))
      flag(who.str() + ": negative demand");
    if (c.source == c.target) flag(who.str() + ": source equals target");
    auto reach = detail::reachable_from(inst, c.source, inst.commodity_edges(i));
    if (c.source != c.target && !reach[c.target])
      flag(who.str() + ": target unreachable through permitted edges");
  }

  rep.offsets_only = inst.offsets_only;
  rep.parallel_links = inst.parallel_links;
  return rep;
}

}  // namespace wardrop
