#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wardrop/generators.hpp"
#include "wardrop/rng.hpp"
#include "wardrop/tntp.hpp"
#include "wardrop/types.hpp"

using namespace wardrop;

TEST_SUITE("model") {

TEST_CASE("make_belief validates without renormalizing") {
  Belief b = make_belief({0.5, 0.5});
  CHECK(b[0] == 0.5);
  Belief pm = make_belief({1.0, 0.0});
  CHECK(pm[0] == 1.0);
  CHECK_THROWS_AS(make_belief({0.3, 0.3}), NotADistribution);
  CHECK_THROWS_AS(make_belief({-0.1, 1.1}), NotADistribution);
  // a sum within 1e-9 is accepted as-is, not rescaled
  Belief close = make_belief({0.5, 0.5 + 5e-10});
  CHECK(close[1] == 0.5 + 5e-10);
}

TEST_CASE("expected_cost_params on the paper fixtures") {
  Instance ex1 = make_example1();
  CostParams p = expected_cost_params(ex1.edges[0], make_belief({0.5, 0.5}));
  CHECK(p.slope == doctest::Approx(2.0));
  CHECK(p.offset == doctest::Approx(2.5));

  Instance ex3 = make_example3();
  CostParams q = expected_cost_params(ex3.edges[0], make_belief({0.75, 0.25}));
  CHECK(q.slope == doctest::Approx(0.25));
  CHECK(q.offset == doctest::Approx(0.75));

  // point mass recovers the per-state parameters exactly
  CostParams r = expected_cost_params(ex1.edges[0], make_belief({0.0, 1.0}));
  CHECK(r.slope == 2.0);
  CHECK(r.offset == 0.0);
}

TEST_CASE("expected_cost_params is linear in the belief") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Edge e = testutil::edge("e", 0, 1,
                            {rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)},
                            {rng.uniform(0, 9), rng.uniform(0, 9), rng.uniform(0, 9)});
    Belief mu = make_belief(rng.simplex_point(3));
    Belief nu = make_belief(rng.simplex_point(3));
    double lam = rng.uniform01();
    std::vector<double> mix(3);
    for (int th = 0; th < 3; ++th) mix[th] = lam * mu[th] + (1 - lam) * nu[th];
    // renormalize the float dust so make_belief accepts the mixture
    double sum = mix[0] + mix[1] + mix[2];
    mix[2] += 1.0 - sum;
    CostParams pm = expected_cost_params(e, mu);
    CostParams pn = expected_cost_params(e, nu);
    CostParams px = expected_cost_params(e, Belief{mix});
    CHECK(px.slope == doctest::Approx(lam * pm.slope + (1 - lam) * pn.slope).epsilon(1e-12));
    CHECK(px.offset ==
          doctest::Approx(lam * pm.offset + (1 - lam) * pn.offset).epsilon(1e-12));
  }
}

TEST_CASE("offsets-only implies belief-independent slopes") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = testutil::random_parallel(rng);
    REQUIRE(inst.offsets_only);
    for (const Edge& e : inst.edges) {
      double s0 = expected_cost_params(e, make_belief({1.0, 0.0})).slope;
      double s1 = expected_cost_params(e, make_belief({0.25, 0.75})).slope;
      CHECK(s0 == doctest::Approx(s1).epsilon(1e-12));
    }
  }
}

TEST_CASE("validate_instance on the fixtures") {
  ValidationReport r1 = validate_instance(make_example1());
  CHECK(r1.valid());
  CHECK(r1.offsets_only);
  CHECK(r1.parallel_links);
  REQUIRE(r1.zero_slope_edges.size() == 1);
  CHECK(r1.zero_slope_edges[0] == 2);  // the constant-3 link

  ValidationReport r3 = validate_instance(make_example3());
  CHECK(r3.valid());
  CHECK_FALSE(r3.offsets_only);

  Instance bad = make_example1();
  bad.commodities[0].demand = -1.0;
  ValidationReport rb = validate_instance(bad);
  CHECK_FALSE(rb.valid());
  bool found = false;
  for (const auto& v : rb.violations)
    if (v.find("negative demand") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate_instance flags self-loops and unreachable targets") {
  std::vector<Edge> edges = {testutil::edge("e1", 0, 0, {1}, {0}),
                             testutil::edge("e2", 0, 1, {1}, {0})};
  Instance inst = make_instance({"a", "b", "c"}, std::move(edges),
                                {Commodity{0, 2, 1.0, std::nullopt}}, {{"th"}, {1.0}});
  ValidationReport rep = validate_instance(inst);
  CHECK_FALSE(rep.valid());
  bool loop = false, unreachable = false;
  for (const auto& v : rep.violations) {
    if (v.find("self-loop") != std::string::npos) loop = true;
    if (v.find("unreachable") != std::string::npos) unreachable = true;
  }
  CHECK(loop);
  CHECK(unreachable);
}

static const char* kMiniTntp =
    "<NUMBER OF NODES> 3\n"
    "<NUMBER OF LINKS> 4\n"
    "<END OF METADATA>\n"
    "~ init term capacity length fftime b power speed toll type\n"
    "1 2 1000 1 4.0 0.15 4 0 0 1 ;\n"
    "2 3 2000 1 6.0 0.15 4 0 0 1 ;\n"
    "1 3 1500 1 5.0 0.15 4 0 0 1 ;\n"
    "3 1 1200 1 2.5 0.15 4 0 0 1 ;\n";

TEST_CASE("parse_tntp reads the net columns") {
  TntpResult res = parse_tntp(kMiniTntp, {});
  const Instance& inst = res.instance;
  CHECK(inst.num_vertices() == 3);
  REQUIRE(inst.num_edges() == 4);
  CHECK(res.randomized_edges == 0);
  CHECK(inst.edges[0].tail == 0);
  CHECK(inst.edges[0].head == 1);
  CHECK(inst.edges[1].offset[0] == doctest::Approx(6.0));
  CHECK(inst.edges[1].slope[0] == doctest::Approx(0.15 * 6.0 / 2000.0));
  // tau = 0: the two states are cost-identical edge-wise
  for (const Edge& e : inst.edges) {
    CHECK(e.offset[0] == e.offset[1]);
    CHECK(e.slope[0] == e.slope[1]);
  }
}

TEST_CASE("parse_tntp randomization is seeded and counted") {
  TntpOptions opt;
  opt.tau = 0.5;
  opt.seed = 7;
  TntpResult a = parse_tntp(kMiniTntp, opt);
  TntpResult b = parse_tntp(kMiniTntp, opt);
  CHECK(a.randomized_edges == 2);  // round(0.5 * 4)
  int changed = 0;
  for (int e = 0; e < 4; ++e) {
    CHECK(a.instance.edges[e].offset[1] == b.instance.edges[e].offset[1]);
    if (a.instance.edges[e].offset[1] != a.instance.edges[e].offset[0]) {
      ++changed;
      CHECK(a.instance.edges[e].offset[1] >= 1.0);
      CHECK(a.instance.edges[e].offset[1] <= 15.0);
    }
  }
  CHECK(changed == 2);

  opt.tau = 1.0;
  TntpResult c = parse_tntp(kMiniTntp, opt);
  CHECK(c.randomized_edges == 4);

  opt.seed = 8;
  TntpResult d = parse_tntp(kMiniTntp, opt);
  bool any_differs = false;
  for (int e = 0; e < 4; ++e)
    if (c.instance.edges[e].offset[1] != d.instance.edges[e].offset[1]) any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("parse_tntp error paths") {
  CHECK_THROWS_AS(parse_tntp("", {}), ParseError);
  CHECK_THROWS_AS(parse_tntp("~ only a comment\n", {}), ParseError);
  CHECK_THROWS_AS(parse_tntp("1 2 1000\n", {}), MissingField);
  CHECK_THROWS_AS(parse_tntp("1 2 x 1 4.0\n", {}), ParseError);
  try {
    parse_tntp("1 2 1000 1 4.0\n1 2 bad 1 4.0\n", {});
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

}  // TEST_SUITE
