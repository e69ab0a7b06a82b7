#pragma once

#include <limits>
#include <string>
#include <vector>

namespace wardrop::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One sparse entry of a constraint row.
struct Term {
  int col;
  double coef;
};

/// minimize c.z  subject to  A z = b,  G z <= h,  lo <= z <= up.
///
/// Rows are sparse, variables are added with explicit bounds (+-inf allowed).
/// This is the single LP interface of the library; everything that needs a
/// polytope (support regions, the signaling program, ordering cells) goes
/// through it.
struct Problem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<std::vector<Term>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<Term>> le_rows;
  std::vector<double> le_rhs;

  int add_var(double lo, double up, double cost = 0.0) {
    lower.push_back(lo);
    upper.push_back(up);
    objective.push_back(cost);
    return num_vars++;
  }
  void add_eq(std::vector<Term> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
  void add_le(std::vector<Term> row, double rhs) {
    le_rows.push_back(std::move(row));
    le_rhs.push_back(rhs);
  }
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct Solution {
  Status status = Status::kIterationLimit;
  double objective = 0.0;
  std::vector<double> z;  // variable values, valid when status == kOptimal

  bool optimal() const { return status == Status::kOptimal; }
};

/// Dense two-phase primal simplex. Deterministic pivoting (Dantzig rule with
/// Bland fallback), feasibility tolerance 1e-7, final basic solution
/// recomputed from the original data to shed accumulated pivot drift.
Solution solve(const Problem& problem);

std::string to_string(Status s);

}  // namespace wardrop::lp
