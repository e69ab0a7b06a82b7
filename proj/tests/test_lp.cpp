#include <doctest.h>

#include "wardrop/lp.hpp"

using namespace wardrop;

TEST_SUITE("lp") {

TEST_CASE("bounded maximum at a vertex") {
  lp::Problem p;
  int x = p.add_var(0, lp::kInf, -1.0);
  int y = p.add_var(0, 2.0, -1.0);
  p.add_le({{x, 1.0}, {y, 1.0}}, 4.0);
  p.add_le({{x, 1.0}}, 3.0);
  lp::Solution s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-4.0));
  CHECK(s.z[x] + s.z[y] == doctest::Approx(4.0));
}

TEST_CASE("equalities with free variables") {
  // min y subject to y >= |x - 3| encoded through two inequalities, x free
  lp::Problem p;
  int x = p.add_var(-lp::kInf, lp::kInf, 0.0);
  int y = p.add_var(-lp::kInf, lp::kInf, 1.0);
  p.add_le({{x, 1.0}, {y, -1.0}}, 3.0);   //  x - 3 <= y
  p.add_le({{x, -1.0}, {y, -1.0}}, -3.0); // -(x-3) <= y
  lp::Solution s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.z[x] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded are told apart") {
  lp::Problem p;
  int a = p.add_var(0, lp::kInf, 0.0);
  p.add_eq({{a, 1.0}}, -2.0);
  CHECK(lp::solve(p).status == lp::Status::kInfeasible);

  lp::Problem q;
  int b = q.add_var(-lp::kInf, lp::kInf, 1.0);
  q.add_le({{b, 1.0}}, 3.0);
  CHECK(lp::solve(q).status == lp::Status::kUnbounded);

  lp::Problem r;
  int c = r.add_var(0, lp::kInf, 0.0);
  int d = r.add_var(0, lp::kInf, 0.0);
  r.add_eq({{c, 1.0}, {d, 1.0}}, 1.0);
  r.add_le({{c, 1.0}}, 0.25);
  r.add_le({{d, 1.0}}, 0.25);
  CHECK(lp::solve(r).status == lp::Status::kInfeasible);
}

TEST_CASE("fixed variables are substituted") {
  lp::Problem p;
  int x = p.add_var(2.0, 2.0, 1.0);
  int y = p.add_var(0.0, lp::kInf, 1.0);
  p.add_eq({{x, 1.0}, {y, 1.0}}, 5.0);
  lp::Solution s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.z[x] == 2.0);
  CHECK(s.z[y] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(5.0));
}

TEST_CASE("degenerate problem stays finite") {
  // classic cycling-prone example (Beale); Bland fallback must terminate it
  lp::Problem p;
  int x1 = p.add_var(0, lp::kInf, -0.75);
  int x2 = p.add_var(0, lp::kInf, 150.0);
  int x3 = p.add_var(0, lp::kInf, -0.02);
  int x4 = p.add_var(0, lp::kInf, 6.0);
  p.add_le({{x1, 0.25}, {x2, -60.0}, {x3, -1.0 / 25.0}, {x4, 9.0}}, 0.0);
  p.add_le({{x1, 0.5}, {x2, -90.0}, {x3, -1.0 / 50.0}, {x4, 3.0}}, 0.0);
  p.add_le({{x3, 1.0}}, 1.0);
  lp::Solution s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-0.05));
}

TEST_CASE("identical runs produce identical solutions") {
  lp::Problem p;
  int x = p.add_var(0, lp::kInf, 1.0);
  int y = p.add_var(0, lp::kInf, 2.0);
  int z = p.add_var(-1.0, 4.0, -1.0);
  p.add_eq({{x, 1.0}, {y, 1.0}, {z, 1.0}}, 5.0);
  p.add_le({{x, 2.0}, {z, 1.0}}, 6.0);
  lp::Solution a = lp::solve(p);
  lp::Solution b = lp::solve(p);
  REQUIRE(a.optimal());
  REQUIRE(b.optimal());
  CHECK(a.objective == b.objective);
  for (int j = 0; j < p.num_vars; ++j) CHECK(a.z[j] == b.z[j]);
}

}  // TEST_SUITE
