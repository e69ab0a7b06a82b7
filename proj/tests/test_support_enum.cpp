#include <doctest.h>

#include <cmath>
#include <set>

#include "test_util.hpp"
#include "wardrop/generators.hpp"
#include "wardrop/rng.hpp"
#include "wardrop/support_enum.hpp"

using namespace wardrop;

namespace {

// alpha = mu_theta1, so a mu_theta2 interval [a, b] is [1-b, 1-a] in alpha
double to_alpha(double mu2) { return 1.0 - mu2; }

std::set<std::string> support_keys(const SupportAtlas& atlas) {
  std::set<std::string> keys;
  for (const auto& region : atlas.regions) keys.insert(region.support.key());
  return keys;
}

}  // namespace

TEST_SUITE("support-enum") {

TEST_CASE("support_region on the Braess supports") {
  Instance braess = make_braess();
  // A1 = {e1..e4} is the equilibrium for mu_theta2 >= 1/2, constant cost 3/2
  auto r1 = support_region(braess, SupportVector{{{0, 1, 2, 3}}});
  REQUIRE(r1.has_value());
  CHECK(r1->alpha_lo == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(r1->alpha_hi == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r1->cost_at(0.1) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(r1->cost_at(0.5) == doctest::Approx(1.5).epsilon(1e-8));

  // A2 = all five: cost 2 - mu_theta2 on mu_theta2 <= 1/2
  auto r2 = support_region(braess, SupportVector{{{0, 1, 2, 3, 4}}});
  REQUIRE(r2.has_value());
  CHECK(r2->alpha_lo == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r2->alpha_hi == doctest::Approx(1.0).epsilon(1e-8));
  for (double mu2 : {0.0, 0.2, 0.5})
    CHECK(r2->cost_at(to_alpha(mu2)) == doctest::Approx(2.0 - mu2).epsilon(1e-7));

  // no belief routes everything on the two offset-1 edges
  CHECK_FALSE(support_region(braess, SupportVector{{{1, 2}}}).has_value());
}

TEST_CASE("support_region on Example 1's two lower links") {
  Instance ex1 = make_example1();
  auto region = support_region(ex1, SupportVector{{{1, 2}}});
  REQUIRE(region.has_value());
  // mu_theta2 in [1/4, 2/5]  <=>  alpha in [3/5, 3/4]
  CHECK(region->alpha_lo == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(region->alpha_hi == doctest::Approx(0.75).epsilon(1e-8));
}

TEST_CASE("support_region preconditions") {
  CHECK_THROWS_AS(support_region(make_example3(), SupportVector{{{0}}}),
                  RequiresOffsetsOnly);
  Instance one_state = make_instance(
      {"s", "t"}, {testutil::edge("e1", 0, 1, {1}, {0})},
      {Commodity{0, 1, 1.0, std::nullopt}}, {{"only"}, {1.0}});
  CHECK_THROWS_AS(support_region(one_state, SupportVector{{{0}}}), RequiresTwoStates);
}

TEST_CASE("enumerate_supports_two_state on Example 1") {
  Instance ex1 = make_example1();
  SupportAtlas atlas = enumerate_supports_two_state(ex1, {});
  REQUIRE(atlas.regions.size() == 5);
  REQUIRE(atlas.breakpoints.size() == 4);
  // breakpoints at mu_theta2 in {1/4, 2/5, 3/4, 4/5}
  std::vector<double> expected_mu2 = {0.8, 0.75, 0.4, 0.25};
  for (size_t k = 0; k < 4; ++k)
    CHECK(atlas.breakpoints[k] == doctest::Approx(to_alpha(expected_mu2[k])).epsilon(1e-8));
  for (const auto& region : atlas.regions) CHECK(region.midpoint_residual <= 1e-6);
}

TEST_CASE("enumerate_supports_two_state on the Braess example") {
  SupportAtlas atlas = enumerate_supports_two_state(make_braess(), {});
  REQUIRE(atlas.regions.size() == 2);
  CHECK(atlas.breakpoints[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(atlas.regions[0].support.sets[0].size() == 4);
  CHECK(atlas.regions[1].support.sets[0].size() == 5);
}

TEST_CASE("exponential support family") {
  SupportAtlas atlas = enumerate_supports_two_state(make_exp_supports(2), {});
  CHECK(atlas.regions.size() >= 8);
}

TEST_CASE("cost_profile values and concavity verdicts") {
  Instance ex1 = make_example1();
  SupportAtlas atlas = enumerate_supports_two_state(ex1, {});
  CostProfile prof = cost_profile(atlas);
  CHECK(prof.value_at(to_alpha(0.0)) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(prof.value_at(to_alpha(1.0)) == doctest::Approx(2.0).epsilon(1e-7));
  for (double mu2 : {0.25, 0.4, 0.55, 0.75, 0.8})
    CHECK(prof.value_at(to_alpha(mu2)) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(is_concave(prof));

  CostProfile braess_prof = cost_profile(enumerate_supports_two_state(make_braess(), {}));
  CHECK_FALSE(is_concave(braess_prof));
  CHECK(braess_prof.value_at(to_alpha(0.0)) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(braess_prof.value_at(to_alpha(0.5)) == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(braess_prof.value_at(to_alpha(1.0)) == doctest::Approx(1.5).epsilon(1e-7));

  // single edge: one region, affine between the endpoint costs
  Instance single = make_instance({"s", "t"}, {testutil::edge("e1", 0, 1, {1, 1}, {2, 5})},
                                  {Commodity{0, 1, 1.0, std::nullopt}},
                                  {{"a", "b"}, {0.5, 0.5}});
  SupportAtlas satlas = enumerate_supports_two_state(single, {});
  CHECK(satlas.regions.size() == 1);
  CostProfile sprof = cost_profile(satlas);
  CHECK(sprof.value_at(0.25) ==
        doctest::Approx(0.75 * sprof.value_at(0.0) + 0.25 * sprof.value_at(1.0))
            .epsilon(1e-9));
  CHECK(is_concave(sprof));

  CostProfile constant{{0.0, 1.0}, {2.0, 2.0}};
  CHECK(is_concave(constant));
}

TEST_CASE("offset orderings over the belief segment") {
  Instance ex1 = make_example1();
  std::vector<OffsetOrdering> orderings = offset_orderings_two_state(ex1);
  REQUIRE(orderings.size() == 4);
  // intersections at mu_theta2 in {2/5, 5/9, 3/4} -> alpha in {3/5, 4/9, 1/4}
  CHECK(orderings[0].alpha_hi == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(orderings[1].alpha_hi == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
  CHECK(orderings[2].alpha_hi == doctest::Approx(0.6).epsilon(1e-10));

  Instance one = make_instance({"s", "t"}, {testutil::edge("e1", 0, 1, {1, 1}, {2, 3})},
                               {Commodity{0, 1, 1.0, std::nullopt}},
                               {{"a", "b"}, {0.5, 0.5}});
  CHECK(offset_orderings_two_state(one).size() == 1);

  std::vector<Edge> twins = {testutil::edge("e1", 0, 1, {1, 1}, {2, 3}),
                             testutil::edge("e2", 0, 1, {1, 1}, {2, 3})};
  Instance glued = make_instance({"s", "t"}, twins, {Commodity{0, 1, 1.0, std::nullopt}},
                                 {{"a", "b"}, {0.5, 0.5}});
  std::vector<OffsetOrdering> g = offset_orderings_two_state(glued);
  REQUIRE(g.size() == 1);
  CHECK(g[0].order == std::vector<int>{0, 1});
}

TEST_CASE("parallel superset covers realized supports") {
  Instance ex2 = make_example2();
  std::vector<SupportVector> superset = enumerate_supports_parallel(ex2);
  std::set<std::string> keys;
  for (const auto& sv : superset) keys.insert(sv.key());
  CHECK(keys.count(SupportVector{{{0}, {0}}}.key()) == 1);
  CHECK(keys.count(SupportVector{{{0}, {1}}}.key()) == 1);

  // all supports realized by the solver at random beliefs appear
  for (const SupportVector& sv : sample_supports(ex2, 50, 99))
    CHECK(keys.count(sv.key()) == 1);

  Instance ex1 = make_example1();
  std::vector<SupportVector> sup1 = enumerate_supports_parallel(ex1);
  std::set<std::string> keys1;
  for (const auto& sv : sup1) keys1.insert(sv.key());
  for (const auto& key : support_keys(enumerate_supports_two_state(ex1, {})))
    CHECK(keys1.count(key) == 1);

  Instance one = make_instance({"s", "t"}, {testutil::edge("e1", 0, 1, {1, 1}, {2, 3})},
                               {Commodity{0, 1, 1.0, std::nullopt}},
                               {{"a", "b"}, {0.5, 0.5}});
  CHECK(enumerate_supports_parallel(one).size() == 1);
}

TEST_CASE("three-state cell decomposition") {
  // three links whose offset planes are in general position
  std::vector<Edge> edges = {testutil::edge("e1", 0, 1, {1, 1, 1}, {0.5, 2.0, 1.0}),
                             testutil::edge("e2", 0, 1, {1, 1, 1}, {2.0, 0.3, 1.1}),
                             testutil::edge("e3", 0, 1, {1, 1, 1}, {1.0, 1.2, 0.2})};
  Instance inst = make_instance({"s", "t"}, edges, {Commodity{0, 1, 1.0, std::nullopt}},
                                {{"a", "b", "c"}, {0.4, 0.3, 0.3}});
  std::vector<SupportVector> superset = enumerate_supports_parallel(inst);
  CHECK(superset.size() >= 3);
  std::set<std::string> keys;
  for (const auto& sv : superset) keys.insert(sv.key());
  for (const SupportVector& sv : sample_supports(inst, 200, 17))
    CHECK(keys.count(sv.key()) == 1);
}

TEST_CASE("degenerate three-state instances are detected") {
  // three pairwise-distinct offset planes meeting at the uniform belief
  std::vector<Edge> edges = {testutil::edge("e1", 0, 1, {1, 1, 1}, {1.0, 1.0, 1.0}),
                             testutil::edge("e2", 0, 1, {1, 1, 1}, {0.0, 2.0, 1.0}),
                             testutil::edge("e3", 0, 1, {1, 1, 1}, {2.0, 0.0, 1.0})};
  Instance inst = make_instance({"s", "t"}, edges, {Commodity{0, 1, 1.0, std::nullopt}},
                                {{"a", "b", "c"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK_THROWS_AS(enumerate_supports_parallel(inst), DegenerateInstance);
}

TEST_CASE("atlas coverage, collinearity, region correctness, lp accounting") {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    Instance inst = testutil::random_parallel(rng, 6);
    EnumOptions opt;
    opt.seed = 1000 + trial;
    SupportAtlas atlas = enumerate_supports_two_state(inst, opt);

    double total = 0.0;
    for (const auto& region : atlas.regions) total += region.alpha_hi - region.alpha_lo;
    CHECK(std::abs(total - 1.0) <= 1e-9);

    int regions = static_cast<int>(atlas.regions.size());
    CHECK(atlas.lp_solves <= 3 * regions + 2);

    for (const auto& region : atlas.regions) {
      double mid = 0.5 * (region.alpha_lo + region.alpha_hi);
      double collinear = 0.5 * (region.cost_lo + region.cost_hi);
      CHECK(std::abs(region.cost_at(mid) - collinear) <= 1e-6);

      EquilibriumResult res = solve_wardrop(inst, make_belief({mid, 1.0 - mid}));
      CHECK(std::abs(res.cost - region.cost_at(mid)) <=
            1e-6 * std::max(1.0, std::abs(res.cost)));
    }
  }

  // region correctness on Example 1: random points per region recover the
  // region's support
  Instance ex1 = make_example1();
  SupportAtlas atlas = enumerate_supports_two_state(ex1, {});
  for (const auto& region : atlas.regions) {
    for (int k = 0; k < 20; ++k) {
      double width = region.alpha_hi - region.alpha_lo;
      double a = region.alpha_lo + width * (0.02 + 0.96 * rng.uniform01());
      EquilibriumResult res = solve_wardrop(ex1, make_belief({a, 1.0 - a}));
      CHECK(SupportVector{res.support}.key() == region.support.key());
    }
  }
}

}  // TEST_SUITE
