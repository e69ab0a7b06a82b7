#include "wardrop/json_io.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace wardrop {

using nlohmann::json;

std::string instance_to_json(const Instance& inst) {
  json doc;
  doc["states"] = inst.state_space.states;
  doc["prior"] = inst.state_space.prior;
  doc["vertices"] = inst.vertices;
  json edges = json::array();
  for (const Edge& e : inst.edges) {
    json je;
    je["id"] = e.id;
    je["tail"] = inst.vertices[e.tail];
    je["head"] = inst.vertices[e.head];
    je["slope"] = e.slope;
    je["offset"] = e.offset;
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  json commodities = json::array();
  for (const Commodity& c : inst.commodities) {
    json jc;
    jc["source"] = inst.vertices[c.source];
    jc["target"] = inst.vertices[c.target];
    jc["demand"] = c.demand;
    if (c.allowed_edges) {
      json ids = json::array();
      for (int e : *c.allowed_edges) ids.push_back(inst.edges[e].id);
      jc["allowed_edges"] = std::move(ids);
    }
    commodities.push_back(std::move(jc));
  }
  doc["commodities"] = std::move(commodities);
  return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    StateSpace states;
    states.states = doc.at("states").get<std::vector<std::string>>();
    states.prior = doc.at("prior").get<std::vector<double>>();
    std::vector<std::string> vertices = doc.at("vertices").get<std::vector<std::string>>();
    auto vy = [&vertices](const std::string& name) {
      for (size_t v = 0; v < vertices.size(); ++v)
        if (vertices[v] == name) return static_cast<int>(v);
      throw ParseError("unknown vertex: " + name);
    };
    std::vector<Edge> edges;
    std::vector<std::string> edge_ids;
    for (const json& je : doc.at("edges")) {
      Edge e;
      e.id = je.at("id").get<std::string>();
      e.tail = vy(je.at("tail").get<std::string>());
      e.head = vy(je.at("head").get<std::string>());
      e.slope = je.at("slope").get<std::vector<double>>();
      e.offset = je.at("offset").get<std::vector<double>>();
      edge_ids.push_back(e.id);
      edges.push_back(std::move(e));
    }
    auto ey = [&edge_ids](const std::string& id) {
      for (size_t e = 0; e < edge_ids.size(); ++e)
        if (edge_ids[e] == id) return static_cast<int>(e);
      throw ParseError("unknown edge id: " + id);
    };
    std::vector<Commodity> commodities;
    if (doc.contains("commodities"))
      for (const json& jc : doc.at("commodities")) {
        Commodity c;
        c.source = vy(jc.at("source").get<std::string>());
        c.target = vy(jc.at("target").get<std::string>());
        c.demand = jc.at("demand").get<double>();
        if (jc.contains("allowed_edges")) {
          std::vector<int> allowed;
          for (const json& id : jc.at("allowed_edges"))
            allowed.push_back(ey(id.get<std::string>()));
          c.allowed_edges = std::move(allowed);
        }
        commodities.push_back(std::move(c));
      }
    return make_instance(std::move(vertices), std::move(edges), std::move(commodities),
                         std::move(states));
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance schema violation: ") + e.what());
  } catch (const BadParameter& e) {
    throw ParseError(std::string("instance schema violation: ") + e.what());
  }
}

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string equilibrium_to_json(const Instance& inst, const EquilibriumResult& res) {
  json doc;
  json edge_ids = json::array();
  for (const Edge& e : inst.edges) edge_ids.push_back(e.id);
  doc["edge_ids"] = std::move(edge_ids);
  doc["vertex_ids"] = inst.vertices;
  doc["loads"] = res.flow.loads;
  doc["flows"] = res.flow.by_commodity;
  json pots = json::array();
  for (const auto& pi : res.potentials) {
    json row = json::array();
    for (double v : pi) row.push_back(finite_or_null(v));
    pots.push_back(std::move(row));
  }
  doc["potentials"] = std::move(pots);
  json support = json::array();
  for (const auto& set : res.support) {
    json ids = json::array();
    for (int e : set) ids.push_back(inst.edges[e].id);
    support.push_back(std::move(ids));
  }
  doc["support"] = std::move(support);
  doc["cost"] = res.cost;
  doc["kkt_residual"] = res.kkt_residual;
  doc["fw_gap"] = res.fw_gap;
  doc["fw_iterations"] = res.fw_iterations;
  doc["refined"] = res.refined;
  return doc.dump(2);
}

std::string scheme_to_json(const SchemeEvaluation& ev) {
  json doc;
  json signals = json::array();
  for (const SignalEvaluation& sig : ev.signals) {
    json js;
    js["phi"] = sig.phi_column;
    js["posterior"] = sig.posterior;
    js["cost"] = sig.cost;
    js["mass"] = sig.mass;
    signals.push_back(std::move(js));
  }
  doc["signals"] = std::move(signals);
  doc["total_cost"] = ev.total_cost;
  return doc.dump(2);
}

namespace {

json support_ids(const Instance& inst, const SupportVector& sv) {
  json out = json::array();
  for (const auto& set : sv.sets) {
    json ids = json::array();
    for (int e : set) ids.push_back(inst.edges[e].id);
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace

std::string atlas_to_json(const Instance& inst, const SupportAtlas& atlas) {
  json doc;
  json regions = json::array();
  for (const SupportRegion& region : atlas.regions) {
    json jr;
    jr["alpha_lo"] = region.alpha_lo;
    jr["alpha_hi"] = region.alpha_hi;
    jr["cost_lo"] = region.cost_lo;
    jr["cost_hi"] = region.cost_hi;
    jr["support"] = support_ids(inst, region.support);
    jr["midpoint_residual"] = region.midpoint_residual;
    regions.push_back(std::move(jr));
  }
  doc["regions"] = std::move(regions);
  doc["breakpoints"] = atlas.breakpoints;
  doc["lp_solves"] = atlas.lp_solves;
  doc["probes"] = atlas.probes;
  return doc.dump(2);
}

std::string atlas_to_csv(const Instance& inst, const SupportAtlas& atlas) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha_lo,alpha_hi,cost_lo,cost_hi,support\n";
  for (const SupportRegion& region : atlas.regions) {
    os << region.alpha_lo << ',' << region.alpha_hi << ',' << region.cost_lo << ','
       << region.cost_hi << ',';
    for (size_t i = 0; i < region.support.sets.size(); ++i) {
      if (i) os << '|';
      const auto& set = region.support.sets[i];
      for (size_t k = 0; k < set.size(); ++k) {
        if (k) os << ';';
        os << inst.edges[set[k]].id;
      }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

json node_to_json(const Instance& inst, const SpDecomposition& dec, int index) {
  const SpNode& node = dec.nodes[index];
  json out;
  out["terminals"] = {inst.vertices[node.source], inst.vertices[node.target]};
  switch (node.kind) {
    case SpNode::Kind::kEdge:
      out["kind"] = "edge";
      out["edge"] = inst.edges[node.edge].id;
      break;
    case SpNode::Kind::kSeries:
    case SpNode::Kind::kParallel:
      out["kind"] = node.kind == SpNode::Kind::kSeries ? "series" : "parallel";
      out["children"] = {node_to_json(inst, dec, node.left),
                         node_to_json(inst, dec, node.right)};
      break;
  }
  return out;
}

}  // namespace

std::string decomposition_to_json(const Instance& inst, const SpDecomposition& dec) {
  json doc;
  doc["tree"] = node_to_json(inst, dec, dec.root);
  json pruned = json::array();
  for (int e : dec.pruned_edges) pruned.push_back(inst.edges[e].id);
  doc["pruned_edges"] = std::move(pruned);
  return doc.dump(2);
}

std::string profile_to_svg(const CostProfile& prof) {
  const double width = 640, height = 400, margin = 50;
  double vmin = prof.values.front(), vmax = vmin;
  for (double v : prof.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax - vmin < 1e-12) {
    vmax += 1.0;
    vmin -= 1.0;
  }
  auto px = [&](double alpha) { return margin + alpha * (width - 2 * margin); };
  auto py = [&](double v) {
    return height - margin - (v - vmin) / (vmax - vmin) * (height - 2 * margin);
  };
  std::ostringstream os;
  os.precision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "  <line x1=\"" << px(0) << "\" y1=\"" << py(vmin) << "\" x2=\"" << px(1)
     << "\" y2=\"" << py(vmin) << "\" stroke=\"black\"/>\n";
  os << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (size_t k = 0; k < prof.breakpoints.size(); ++k) {
    if (k) os << ' ';
    os << px(prof.breakpoints[k]) << ',' << py(prof.values[k]);
  }
  os << "\"/>\n";
  for (size_t k = 0; k < prof.breakpoints.size(); ++k)
    os << "  <circle cx=\"" << px(prof.breakpoints[k]) << "\" cy=\""
       << py(prof.values[k]) << "\" r=\"3\" fill=\"crimson\"/>\n";
  for (double alpha : {0.0, 0.5, 1.0})
    os << "  <text x=\"" << px(alpha) << "\" y=\"" << height - margin / 2
       << "\" font-size=\"12\" text-anchor=\"middle\">" << alpha << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace wardrop
