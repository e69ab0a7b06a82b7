#include "wardrop/series_parallel.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "adjacency.hpp"

namespace wardrop {

namespace {

std::vector<int> all_edges(const Instance& inst) {
  std::vector<int> e(inst.num_edges());
  for (int k = 0; k < inst.num_edges(); ++k) e[k] = k;
  return e;
}

// Edges on some s-t path by the reachability criterion: tail reachable from
// s and head co-reachable to t.
void prune_edges(const Instance& inst, int s, int t, std::vector<int>& kept,
                 std::vector<int>& pruned) {
  auto reach = detail::reachable_from(inst, s, all_edges(inst));
  auto coreach = detail::coreachable_to(inst, t, all_edges(inst));
  for (int e = 0; e < inst.num_edges(); ++e) {
    const Edge& ed = inst.edges[e];
    if (reach[ed.tail] && coreach[ed.head] && ed.tail != ed.head)
      kept.push_back(e);
    else
      pruned.push_back(e);
  }
}

}  // namespace

SpResult is_series_parallel(const Instance& network, int s, int t) {
  if (s == t) throw BadTerminals("terminals coincide");
  auto reach = detail::reachable_from(network, s, all_edges(network));
  if (!reach[t]) throw BadTerminals("target unreachable from source");

  std::vector<int> kept, pruned;
  prune_edges(network, s, t, kept, pruned);

  // active super-edges over the decomposition forest
  struct Super {
    int tail, head, node;
  };
  std::vector<SpNode> nodes;
  std::vector<Super> active;
  for (int e : kept) {
    SpNode leaf;
    leaf.kind = SpNode::Kind::kEdge;
    leaf.edge = e;
    leaf.source = network.edges[e].tail;
    leaf.target = network.edges[e].head;
    active.push_back({leaf.source, leaf.target, static_cast<int>(nodes.size())});
    nodes.push_back(leaf);
  }

  bool changed = true;
  while (changed && active.size() > 1) {
    changed = false;

    // parallel merges: any two super-edges sharing tail and head
    std::map<std::pair<int, int>, std::vector<size_t>> by_pair;
    for (size_t k = 0; k < active.size(); ++k)
      by_pair[{active[k].tail, active[k].head}].push_back(k);
    std::set<size_t> dead;
    for (auto& [pair, group] : by_pair) {
      if (group.size() < 2) continue;
      changed = true;
      size_t keep = group[0];
      for (size_t g = 1; g < group.size(); ++g) {
        SpNode merged;
        merged.kind = SpNode::Kind::kParallel;
        merged.source = pair.first;
        merged.target = pair.second;
        merged.left = active[keep].node;
        merged.right = active[group[g]].node;
        active[keep].node = static_cast<int>(nodes.size());
        nodes.push_back(merged);
        dead.insert(group[g]);
      }
    }
    if (!dead.empty()) {
      std::vector<Super> next;
      for (size_t k = 0; k < active.size(); ++k)
        if (!dead.count(k)) next.push_back(active[k]);
      active = std::move(next);
    }

    // series merges: interior vertex with exactly one in- and one out-edge
    for (int v = 0; v < network.num_vertices(); ++v) {
      if (v == s || v == t) continue;
      int in = -1, out = -1, in_count = 0, out_count = 0;
      for (size_t k = 0; k < active.size(); ++k) {
        if (active[k].head == v) {
          in = static_cast<int>(k);
          ++in_count;
        }
        if (active[k].tail == v) {
          out = static_cast<int>(k);
          ++out_count;
        }
      }
      if (in_count != 1 || out_count != 1) continue;
      if (active[in].tail == active[out].head) continue;  // would close a loop
      SpNode merged;
      merged.kind = SpNode::Kind::kSeries;
      merged.source = active[in].tail;
      merged.target = active[out].head;
      merged.left = active[in].node;
      merged.right = active[out].node;
      active[in] = {merged.source, merged.target, static_cast<int>(nodes.size())};
      nodes.push_back(merged);
      active.erase(active.begin() + out);
      changed = true;
    }
  }

  if (active.size() == 1 && active[0].tail == s && active[0].head == t) {
    SpDecomposition dec;
    dec.nodes = std::move(nodes);
    dec.root = active[0].node;
    dec.pruned_edges = std::move(pruned);
    return dec;
  }

  NotSp res;
  res.pruned_edges = std::move(pruned);
  // report the original edges under the surviving super-edges
  std::vector<int> stack;
  for (const Super& sup : active) stack.push_back(sup.node);
  while (!stack.empty()) {
    const SpNode& node = nodes[stack.back()];
    stack.pop_back();
    if (node.kind == SpNode::Kind::kEdge)
      res.kernel_edges.push_back(node.edge);
    else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(res.kernel_edges.begin(), res.kernel_edges.end());
  return res;
}

RevelationGuarantee full_revelation_guarantee(const Instance& inst) {
  RevelationGuarantee out;
  if (inst.num_commodities() != 1) {
    out.reasons.push_back(inst.num_commodities() == 0 ? "no commodities"
                                                      : "multiple commodities");
  }
  if (!inst.offsets_only) out.reasons.push_back("state-dependent slopes");
  if (inst.num_commodities() == 1) {
    const Commodity& com = inst.commodities[0];
    Instance view = inst;
    if (com.allowed_edges) {
      // recognition runs on the permitted subgraph
      std::vector<Edge> edges;
      for (int e : *com.allowed_edges) edges.push_back(inst.edges[e]);
      view = make_instance(inst.vertices, std::move(edges), {}, inst.state_space);
    }
    try {
      if (!sp_ok(is_series_parallel(view, com.source, com.target)))
        out.reasons.push_back("not series-parallel");
    } catch (const BadTerminals&) {
      out.reasons.push_back("target unreachable");
    }
  }
  out.guaranteed = out.reasons.empty();
  return out;
}

// ---------------------------------------------------------------------------
// braess_witness
// ---------------------------------------------------------------------------

namespace {

// Simple directed paths from `from` to `to` whose interior avoids `used`;
// endpoints are exempt. Paths are produced in lexicographic edge order and
// fed to the callback until it returns true.
bool enumerate_paths(const Instance& inst, const std::vector<int>& edges, int from,
                     int to, int min_edges, const std::vector<bool>& used,
                     std::vector<int>& path,
                     const std::function<bool(const std::vector<int>&)>& visit) {
  if (from == to && static_cast<int>(path.size()) >= min_edges)
    if (visit(path)) return true;
  for (int e : edges) {
    const Edge& ed = inst.edges[e];
    if (ed.tail != from) continue;
    if (std::find(path.begin(), path.end(), e) != path.end()) continue;
    int next = ed.head;
    if (next != to && used[next]) continue;
    bool revisit = false;  // interior vertices must stay distinct
    for (int pe : path)
      if (inst.edges[pe].tail == next || inst.edges[pe].head == next) revisit = true;
    if (revisit || next == from) continue;
    path.push_back(e);
    if (enumerate_paths(inst, edges, next, to, min_edges, used, path, visit)) return true;
    path.pop_back();
  }
  return false;
}

struct SegmentPlan {
  std::vector<int> sh, hi, hk, ij, jk, il, kl, lt;
  int vh = -1, vi = -1, vk = -1, vl = -1;
};

void mark(const Instance& inst, const std::vector<int>& path, std::vector<bool>& used) {
  for (int e : path) {
    used[inst.edges[e].tail] = true;
    used[inst.edges[e].head] = true;
  }
}

}  // namespace

BraessWitness braess_witness(const Instance& network, int s, int t) {
  SpResult sp = is_series_parallel(network, s, t);
  if (sp_ok(sp))
    throw GraphIsSeriesParallel("the network is series-parallel for these terminals");

  std::vector<int> kept, pruned_list;
  prune_edges(network, s, t, kept, pruned_list);
  const int n = network.num_vertices();

  SegmentPlan plan;
  int center = -1;

  // Stage the six-segment search around every candidate center edge b.
  for (int b : kept) {
    const int vj = network.edges[b].tail;
    const int vj1 = network.edges[b].head;
    // a simple cycle through the virtual (t,s) edge visits s and t once, so
    // the center edge never touches a terminal
    if (vj == s || vj == t || vj1 == s || vj1 == t) continue;
    std::vector<bool> base(n, false);
    base[vj] = base[vj1] = base[s] = base[t] = true;

    // candidate (vi, IJ): a path vi -> vj, possibly empty
    bool found = false;
    for (int vi = 0; vi < n && !found; ++vi) {
      if (vi == vj1 || vi == s || vi == t) continue;
      std::vector<int> path_ij;
      std::vector<bool> used0 = base;
      used0[vi] = true;
      auto try_ij = [&](const std::vector<int>& ij) -> bool {
        std::vector<bool> used1 = used0;
        mark(network, ij, used1);
        // (vk, JK): a path vj1 -> vk, possibly empty
        for (int vk = 0; vk < n; ++vk) {
          if (vk == vi || vk == vj || vk == s || vk == t) continue;
          if (used1[vk] && vk != vj1) continue;
          std::vector<int> path_jk;
          std::vector<bool> used2 = used1;
          used2[vk] = true;
          auto try_jk = [&](const std::vector<int>& jk) -> bool {
            std::vector<bool> used3 = used2;
            mark(network, jk, used3);
            for (int vh = 0; vh < n; ++vh) {
              if (used3[vh] && vh != s) continue;
              if (vh == t) continue;
              std::vector<bool> used4 = used3;
              used4[vh] = true;
              std::vector<int> path_hi;
              auto try_hi = [&](const std::vector<int>& hi) -> bool {
                std::vector<bool> used5 = used4;
                mark(network, hi, used5);
                std::vector<int> path_hk;
                auto try_hk = [&](const std::vector<int>& hk) -> bool {
                  std::vector<bool> used6 = used5;
                  mark(network, hk, used6);
                  for (int vl = 0; vl < n; ++vl) {
                    if (used6[vl] && vl != t) continue;
                    if (vl == vh || vl == s) continue;
                    std::vector<bool> used7 = used6;
                    used7[vl] = true;
                    std::vector<int> path_il;
                    auto try_il = [&](const std::vector<int>& il) -> bool {
                      std::vector<bool> used8 = used7;
                      mark(network, il, used8);
                      std::vector<int> path_kl;
                      auto try_kl = [&](const std::vector<int>& kl) -> bool {
                        std::vector<bool> used9 = used8;
                        mark(network, kl, used9);
                        std::vector<int> path_sh;
                        auto try_sh = [&](const std::vector<int>& sh) -> bool {
                          std::vector<bool> used10 = used9;
                          mark(network, sh, used10);
                          std::vector<int> path_lt;
                          auto try_lt = [&](const std::vector<int>& lt) -> bool {
                            plan.sh = sh;
                            plan.hi = path_hi;
                            plan.hk = path_hk;
                            plan.ij = ij;
                            plan.jk = jk;
                            plan.il = il;
                            plan.kl = kl;
                            plan.lt = lt;
                            plan.vh = vh;
                            plan.vi = vi;
                            plan.vk = vk;
                            plan.vl = vl;
                            return true;
                          };
                          return enumerate_paths(network, kept, vl, t, 0, used10,
                                                 path_lt, try_lt);
                        };
                        return enumerate_paths(network, kept, s, vh, 0, used9, path_sh,
                                               try_sh);
                      };
                      return enumerate_paths(network, kept, vk, vl, 1, used8, path_kl,
                                             try_kl);
                    };
                    if (enumerate_paths(network, kept, vi, vl, 1, used7, path_il,
                                        try_il))
                      return true;
                  }
                  return false;
                };
                return enumerate_paths(network, kept, vh, vk, 1, used5, path_hk,
                                       try_hk);
              };
              if (enumerate_paths(network, kept, vh, vi, 1, used4, path_hi, try_hi))
                return true;
            }
            return false;
          };
          if (enumerate_paths(network, kept, vj1, vk, vk == vj1 ? 0 : 1, used2,
                              path_jk, try_jk))
            return true;
        }
        return false;
      };
      found = enumerate_paths(network, kept, vi, vj, vi == vj ? 0 : 1, used0, path_ij,
                              try_ij);
      if (found) center = b;
    }
    if (found) break;
  }
  if (center < 0)
    throw std::runtime_error(
        "no embedded Wheatstone found although the network is not series-parallel");

  // cost assignment: x on one HI and one KL edge, 1 on one HK and one IL
  // edge, 0 on the remaining segment edges, 1e6 off the segments; only b's
  // offset is state-dependent
  const double kFar = 1e6;
  std::vector<Edge> edges = network.edges;
  for (Edge& ed : edges) {
    ed.slope = {0.0, 0.0};
    ed.offset = {kFar, kFar};
  }
  auto zero_out = [&](const std::vector<int>& seg) {
    for (int e : seg) {
      edges[e].slope = {0.0, 0.0};
      edges[e].offset = {0.0, 0.0};
    }
  };
  zero_out(plan.sh);
  zero_out(plan.hi);
  zero_out(plan.hk);
  zero_out(plan.ij);
  zero_out(plan.jk);
  zero_out(plan.il);
  zero_out(plan.kl);
  zero_out(plan.lt);

  BraessWitness out;
  out.center_edge = center;
  edges[center].slope = {0.0, 0.0};
  edges[center].offset = {0.0, 1.0};
  edges[plan.hi.front()].slope = {1.0, 1.0};
  edges[plan.kl.front()].slope = {1.0, 1.0};
  out.x_edges = {plan.hi.front(), plan.kl.front()};
  edges[plan.hk.front()].offset = {1.0, 1.0};
  edges[plan.il.front()].offset = {1.0, 1.0};
  out.one_edges = {plan.hk.front(), plan.il.front()};

  if (plan.ij.empty()) out.notes.push_back("upper dotted segment contracted (vi = vj)");
  if (plan.jk.empty()) out.notes.push_back("lower dotted segment contracted (vj+1 = vk)");
  if (plan.sh.empty()) out.notes.push_back("source segment contracted (s = vh)");
  if (plan.lt.empty()) out.notes.push_back("target segment contracted (vl = t)");

  out.instance = make_instance(network.vertices, std::move(edges),
                               {Commodity{s, t, 1.0, std::nullopt}},
                               StateSpace{{"theta1", "theta2"}, {0.5, 0.5}});
  return out;
}

}  // namespace wardrop
