#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "test_util.hpp"
#include "wardrop/generators.hpp"
#include "wardrop/rng.hpp"
#include "wardrop/series_parallel.hpp"
#include "wardrop/signaling.hpp"

using namespace wardrop;

namespace {

// Brute-force ground truth via Duffin confluence: a two-terminal graph in
// which every edge lies on an s-t path is series-parallel iff no edge is
// traversed forward by one undirected simple s-t path and backward by
// another (the two traversals close the two cycles through the virtual
// (t,s) edge with opposite orientations of the edge).
struct Arc {
  int tail, head;
};

void walk_undirected(const std::vector<Arc>& arcs, int at, int t,
                     std::vector<bool>& seen, std::vector<int>& used_dir,
                     std::vector<std::pair<int, int>>& marks) {
  if (at == t) {
    for (size_t e = 0; e < arcs.size(); ++e) {
      if (used_dir[e] == 1) ++marks[e].first;
      if (used_dir[e] == -1) ++marks[e].second;
    }
    return;
  }
  for (size_t e = 0; e < arcs.size(); ++e) {
    if (used_dir[e] != 0) continue;
    int next = -1, dir = 0;
    if (arcs[e].tail == at && !seen[arcs[e].head]) {
      next = arcs[e].head;
      dir = 1;
    } else if (arcs[e].head == at && !seen[arcs[e].tail]) {
      next = arcs[e].tail;
      dir = -1;
    }
    if (next < 0) continue;
    seen[next] = true;
    used_dir[e] = dir;
    walk_undirected(arcs, next, t, seen, used_dir, marks);
    used_dir[e] = 0;
    seen[next] = false;
  }
}

bool duffin_series_parallel(const std::vector<Arc>& arcs, int n, int s, int t) {
  std::vector<std::pair<int, int>> marks(arcs.size(), {0, 0});
  std::vector<bool> seen(n, false);
  std::vector<int> used_dir(arcs.size(), 0);
  seen[s] = true;
  walk_undirected(arcs, s, t, seen, used_dir, marks);
  for (auto [fwd, bwd] : marks)
    if (fwd > 0 && bwd > 0) return false;
  return true;
}

// every arc on some simple directed s-t path?
void walk_directed(const std::vector<Arc>& arcs, int at, int t, std::vector<bool>& seen,
                   std::vector<bool>& used, std::vector<bool>& on_path) {
  if (at == t) {
    for (size_t e = 0; e < arcs.size(); ++e)
      if (used[e]) on_path[e] = true;
    return;
  }
  for (size_t e = 0; e < arcs.size(); ++e) {
    if (used[e] || arcs[e].tail != at || seen[arcs[e].head]) continue;
    seen[arcs[e].head] = true;
    used[e] = true;
    walk_directed(arcs, arcs[e].head, t, seen, used, on_path);
    used[e] = false;
    seen[arcs[e].head] = false;
  }
}

Instance arcs_to_instance(const std::vector<Arc>& arcs, int n) {
  std::vector<std::string> vertices(n);
  for (int v = 0; v < n; ++v) vertices[v] = "v" + std::to_string(v);
  std::vector<Edge> edges;
  for (size_t e = 0; e < arcs.size(); ++e)
    edges.push_back(testutil::edge("e" + std::to_string(e + 1), arcs[e].tail,
                                   arcs[e].head, {1, 1}, {0, 0}));
  return make_instance(std::move(vertices), std::move(edges), {},
                       {{"a", "b"}, {0.5, 0.5}});
}

int count_leaves(const SpDecomposition& dec, int index) {
  const SpNode& node = dec.nodes[index];
  if (node.kind == SpNode::Kind::kEdge) return 1;
  return count_leaves(dec, node.left) + count_leaves(dec, node.right);
}

Instance subdivide_every_edge(const Instance& inst) {
  std::vector<std::string> vertices = inst.vertices;
  std::vector<Edge> edges;
  for (const Edge& e : inst.edges) {
    int mid = static_cast<int>(vertices.size());
    vertices.push_back("m_" + e.id);
    edges.push_back(testutil::edge(e.id + "a", e.tail, mid, e.slope, e.offset));
    edges.push_back(testutil::edge(e.id + "b", mid, e.head, {0, 0}, {0, 0}));
  }
  return make_instance(std::move(vertices), std::move(edges), inst.commodities,
                       inst.state_space);
}

double witness_gap(const Instance& witness) {
  TwoStateSchemeResult best = optimal_scheme_two_state(witness, {0.5, 0.5});
  SchemeEvaluation full = evaluate_scheme(witness, full_revelation_scheme({0.5, 0.5}));
  return full.total_cost - best.cost;
}

}  // namespace

TEST_SUITE("series-parallel") {

TEST_CASE("recognition on the fixtures") {
  Instance ex1 = make_example1();
  SpResult sp1 = is_series_parallel(ex1, 0, 1);
  REQUIRE(sp_ok(sp1));
  const auto& dec = std::get<SpDecomposition>(sp1);
  CHECK(dec.nodes[dec.root].kind == SpNode::Kind::kParallel);
  CHECK(count_leaves(dec, dec.root) == 3);

  SpResult spb = is_series_parallel(make_braess(), 0, 3);
  REQUIRE_FALSE(sp_ok(spb));
  CHECK(std::get<NotSp>(spb).kernel_edges.size() == 5);

  std::vector<Edge> chain = {testutil::edge("e1", 0, 1, {1}, {0}),
                             testutil::edge("e2", 1, 2, {1}, {0})};
  Instance two = make_instance({"s", "m", "t"}, chain, {}, {{"th"}, {1.0}});
  SpResult sp2 = is_series_parallel(two, 0, 2);
  REQUIRE(sp_ok(sp2));
  CHECK(std::get<SpDecomposition>(sp2).nodes[std::get<SpDecomposition>(sp2).root].kind ==
        SpNode::Kind::kSeries);

  CHECK_THROWS_AS(is_series_parallel(two, 2, 0), BadTerminals);
}

TEST_CASE("edges off every s-t path are pruned and reported") {
  std::vector<Edge> edges = {testutil::edge("e1", 0, 1, {1}, {0}),
                             testutil::edge("e2", 1, 2, {1}, {0}),
                             testutil::edge("e3", 1, 3, {1}, {0})};  // dead end
  Instance inst = make_instance({"s", "m", "t", "x"}, edges, {}, {{"th"}, {1.0}});
  SpResult sp = is_series_parallel(inst, 0, 2);
  REQUIRE(sp_ok(sp));
  REQUIRE(std::get<SpDecomposition>(sp).pruned_edges.size() == 1);
  CHECK(std::get<SpDecomposition>(sp).pruned_edges[0] == 2);
}

TEST_CASE("random sp compositions are recognized") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = testutil::random_sp_instance(rng, 2 + static_cast<int>(rng.below(7)));
    CHECK(sp_ok(is_series_parallel(inst, 0, 1)));
  }
}

TEST_CASE("exhaustive agreement with the Duffin oracle up to 6 edges") {
  // all digraphs on n vertices with <= 6 arcs in which every arc lies on a
  // simple directed s-t path; s = 0, t = n-1
  long compared = 0, sp_count = 0, mismatches = 0;
  std::string first_mismatch;
  for (int n : {3, 4, 5, 6}) {
    std::vector<Arc> all_arcs;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v) all_arcs.push_back({u, v});
    const int an = static_cast<int>(all_arcs.size());
    const int max_edges = 6;

    std::vector<int> pick;
    std::function<void(int)> sweep = [&](int from) {
      if (!pick.empty()) {
        std::vector<Arc> arcs;
        for (int k : pick) arcs.push_back(all_arcs[k]);
        std::vector<bool> on_path(arcs.size(), false), seen(n, false),
            used(arcs.size(), false);
        seen[0] = true;
        walk_directed(arcs, 0, n - 1, seen, used, on_path);
        bool all_on = true;
        for (bool b : on_path) all_on = all_on && b;
        if (all_on) {
          Instance inst = arcs_to_instance(arcs, n);
          bool mine = sp_ok(is_series_parallel(inst, 0, n - 1));
          bool oracle = duffin_series_parallel(arcs, n, 0, n - 1);
          ++compared;
          if (mine) ++sp_count;
          if (mine != oracle && ++mismatches == 1) {
            std::ostringstream os;
            os << "n=" << n << " arcs:";
            for (const Arc& a : arcs) os << ' ' << a.tail << "->" << a.head;
            os << " reduction=" << mine << " duffin=" << oracle;
            first_mismatch = os.str();
          }
        }
      }
      if (static_cast<int>(pick.size()) == max_edges) return;
      for (int k = from; k < an; ++k) {
        pick.push_back(k);
        sweep(k + 1);
        pick.pop_back();
      }
    };
    sweep(0);
  }
  INFO(first_mismatch);
  CHECK(mismatches == 0);
  CHECK(compared > 1000);
  CHECK(sp_count > 0);
  CHECK(sp_count < compared);

  // a few multigraph cases on top of the simple sweep
  std::vector<Arc> twins = {{0, 1}, {0, 1}, {1, 2}, {1, 2}};
  CHECK(sp_ok(is_series_parallel(arcs_to_instance(twins, 3), 0, 2)) ==
        duffin_series_parallel(twins, 3, 0, 2));
  std::vector<Arc> braess_arcs = {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {1, 2}, {0, 1}};
  CHECK(sp_ok(is_series_parallel(arcs_to_instance(braess_arcs, 4), 0, 3)) ==
        duffin_series_parallel(braess_arcs, 4, 0, 3));
}

TEST_CASE("full_revelation_guarantee premises") {
  CHECK(full_revelation_guarantee(make_example1()).guaranteed);

  RevelationGuarantee braess = full_revelation_guarantee(make_braess());
  CHECK_FALSE(braess.guaranteed);
  REQUIRE(braess.reasons.size() == 1);
  CHECK(braess.reasons[0] == "not series-parallel");

  RevelationGuarantee ex2 = full_revelation_guarantee(make_example2());
  CHECK_FALSE(ex2.guaranteed);
  CHECK(ex2.reasons[0] == "multiple commodities");

  RevelationGuarantee ex3 = full_revelation_guarantee(make_example3());
  CHECK_FALSE(ex3.guaranteed);
  CHECK(ex3.reasons[0] == "state-dependent slopes");
}

TEST_CASE("braess_witness reproduces the Example 5 assignment") {
  Instance braess = make_braess();
  BraessWitness wit = braess_witness(braess, 0, 3);
  CHECK(braess.edges[wit.center_edge].id == "e5");
  std::set<std::string> x_ids, one_ids;
  for (int e : wit.x_edges) x_ids.insert(braess.edges[e].id);
  for (int e : wit.one_edges) one_ids.insert(braess.edges[e].id);
  CHECK(x_ids == std::set<std::string>{"e1", "e4"});
  CHECK(one_ids == std::set<std::string>{"e2", "e3"});
  CHECK(wit.instance.edges[wit.center_edge].offset[0] == 0.0);
  CHECK(wit.instance.edges[wit.center_edge].offset[1] == 1.0);

  CostProfile prof =
      cost_profile(enumerate_supports_two_state(wit.instance, {}));
  CHECK_FALSE(is_concave(prof));
  CHECK(witness_gap(wit.instance) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("witness survives subdividing every edge") {
  Instance sub = subdivide_every_edge(make_braess());
  REQUIRE_FALSE(sp_ok(is_series_parallel(sub, 0, 3)));
  BraessWitness wit = braess_witness(sub, 0, 3);
  double gap = witness_gap(wit.instance);
  CHECK(gap >= 0.2);

  // no equilibrium flow touches the large-offset edges
  EquilibriumResult res = solve_wardrop(wit.instance, make_belief({0.5, 0.5}));
  for (int e = 0; e < wit.instance.num_edges(); ++e)
    if (wit.instance.edges[e].offset[0] >= 1e6) CHECK(res.flow.loads[e] <= 1e-9);
}

TEST_CASE("witness corpus gap bound") {
  // Wheatstone plus an extra parallel outer edge, and a doubled-bridge net
  std::vector<Arc> extra = {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {1, 2}, {0, 3}};
  Instance g1 = arcs_to_instance(extra, 4);
  REQUIRE_FALSE(sp_ok(is_series_parallel(g1, 0, 3)));
  CHECK(witness_gap(braess_witness(g1, 0, 3).instance) >= 0.2);

  std::vector<Arc> doubled = {{0, 1}, {0, 1}, {1, 3}, {0, 2}, {2, 3}, {1, 2}};
  Instance g2 = arcs_to_instance(doubled, 4);
  REQUIRE_FALSE(sp_ok(is_series_parallel(g2, 0, 3)));
  CHECK(witness_gap(braess_witness(g2, 0, 3).instance) >= 0.2);
}

TEST_CASE("witness refuses series-parallel graphs") {
  CHECK_THROWS_AS(braess_witness(make_example1(), 0, 1), GraphIsSeriesParallel);
}

}  // TEST_SUITE
