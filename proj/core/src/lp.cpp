#include "wardrop/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace wardrop::lp {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// How an original variable maps into the nonnegative standard form.
struct VarMap {
  enum Kind { kFixed, kShifted, kNegated, kFree } kind = kShifted;
  int col = -1;        // primary column
  int col_neg = -1;    // minus part for free variables
  double shift = 0.0;  // x = shift + x' (kShifted) or x = shift - x' (kNegated)
};

// A x = b, x >= 0, after bound shifting, free-variable splitting and slacks.
struct StandardForm {
  int num_cols = 0;
  std::vector<std::vector<Term>> rows;
  std::vector<double> rhs;
  std::vector<VarMap> maps;
};

StandardForm build_standard_form(const Problem& p) {
  StandardForm sf;
  sf.maps.resize(p.num_vars);
  std::vector<std::pair<int, double>> upper_rows;

  for (int j = 0; j < p.num_vars; ++j) {
    double lo = p.lower[j], up = p.upper[j];
    VarMap& vm = sf.maps[j];
    if (lo == up) {
      vm.kind = VarMap::kFixed;
      vm.shift = lo;
    } else if (lo > -kInf && up < kInf) {
      vm.kind = VarMap::kShifted;
      vm.shift = lo;
      vm.col = sf.num_cols++;
      upper_rows.emplace_back(vm.col, up - lo);
    } else if (lo > -kInf) {
      vm.kind = VarMap::kShifted;
      vm.shift = lo;
      vm.col = sf.num_cols++;
    } else if (up < kInf) {
      vm.kind = VarMap::kNegated;
      vm.shift = up;
      vm.col = sf.num_cols++;
    } else {
      vm.kind = VarMap::kFree;
      vm.col = sf.num_cols++;
      vm.col_neg = sf.num_cols++;
    }
  }

  auto convert = [&sf](const std::vector<Term>& row, double rhs_in,
                       std::vector<Term>& out, double& rhs_out) {
    rhs_out = rhs_in;
    for (const Term& t : row) {
      const VarMap& vm = sf.maps[t.col];
      switch (vm.kind) {
        case VarMap::kFixed:
          rhs_out -= t.coef * vm.shift;
          break;
        case VarMap::kShifted:
          rhs_out -= t.coef * vm.shift;
          out.push_back({vm.col, t.coef});
          break;
        case VarMap::kNegated:
          rhs_out -= t.coef * vm.shift;
          out.push_back({vm.col, -t.coef});
          break;
        case VarMap::kFree:
          out.push_back({vm.col, t.coef});
          out.push_back({vm.col_neg, -t.coef});
          break;
      }
    }
  };

  for (size_t r = 0; r < p.eq_rows.size(); ++r) {
    std::vector<Term> out;
    double rhs;
    convert(p.eq_rows[r], p.eq_rhs[r], out, rhs);
    sf.rows.push_back(std::move(out));
    sf.rhs.push_back(rhs);
  }
  // slack columns turn <= rows into equalities
  auto add_le = [&sf](std::vector<Term> out, double rhs) {
    out.push_back({sf.num_cols++, 1.0});
    sf.rows.push_back(std::move(out));
    sf.rhs.push_back(rhs);
  };
  for (size_t r = 0; r < p.le_rows.size(); ++r) {
    std::vector<Term> out;
    double rhs;
    convert(p.le_rows[r], p.le_rhs[r], out, rhs);
    add_le(std::move(out), rhs);
  }
  for (auto [col, bound] : upper_rows) add_le({{col, 1.0}}, bound);
  return sf;
}

// Dense two-phase tableau simplex on the standard form. Pivot choice is
// deterministic: Dantzig rule, switching to Bland's rule after a stall, so
// repeated runs produce identical bases.
class Simplex {
 public:
  explicit Simplex(const StandardForm& sf) : sf_(sf) { build(); }

  Status run(const std::vector<double>& structural_costs) {
    if (has_artificials_) {
      std::vector<double> c1(n_, 0.0);
      for (int j = sf_.num_cols; j < n_; ++j) c1[j] = 1.0;
      load_costs(std::move(c1));
      Status s = iterate(/*phase1=*/true);
      if (s == Status::kIterationLimit) return s;
      if (objective_value() > kFeasTol) return Status::kInfeasible;
      purge_artificials();
    }
    std::vector<double> c2(n_, 0.0);
    std::copy(structural_costs.begin(), structural_costs.end(), c2.begin());
    load_costs(std::move(c2));
    return iterate(/*phase1=*/false);
  }

  // Basic solution over standard-form columns. Basic values are re-solved
  // from the untouched initial rows so pivot round-off does not leak out.
  std::vector<double> extract() {
    refine_basics();
    std::vector<double> x(sf_.num_cols, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < sf_.num_cols) x[basic_[i]] = std::max(0.0, rhs_[i]);
    return x;
  }

 private:
  const StandardForm& sf_;
  int m_ = 0;  // active rows
  int n_ = 0;  // columns including artificials
  bool has_artificials_ = false;
  std::vector<std::vector<double>> tab_;
  std::vector<double> rhs_;
  std::vector<std::vector<double>> tab0_;  // frozen initial tableau
  std::vector<double> rhs0_;
  std::vector<int> alive_;  // current row -> initial row
  std::vector<double> red_, costs_;
  std::vector<int> basic_;
  std::vector<bool> frozen_;

  void build() {
    m_ = static_cast<int>(sf_.rows.size());
    tab_.assign(m_, std::vector<double>(sf_.num_cols, 0.0));
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double mx = 0.0;
      for (const Term& t : sf_.rows[i]) mx = std::max(mx, std::abs(t.coef));
      double s = mx > 0 ? 1.0 / mx : 1.0;
      for (const Term& t : sf_.rows[i]) tab_[i][t.col] += t.coef * s;
      rhs_[i] = sf_.rhs[i] * s;
      if (rhs_[i] < 0) {
        for (double& v : tab_[i]) v = -v;
        rhs_[i] = -rhs_[i];
      }
    }

    // start from singleton columns with a positive coefficient (slacks of
    // un-flipped rows, typically); the row is rescaled so the entry is 1
    basic_.assign(m_, -1);
    std::vector<int> col_row(sf_.num_cols, -1), col_count(sf_.num_cols, 0);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < sf_.num_cols; ++j)
        if (tab_[i][j] != 0.0) {
          ++col_count[j];
          col_row[j] = i;
        }
    for (int j = 0; j < sf_.num_cols; ++j) {
      int i = col_row[j];
      if (col_count[j] != 1 || i < 0 || basic_[i] >= 0 || tab_[i][j] <= kPivTol) continue;
      double inv = 1.0 / tab_[i][j];
      for (double& v : tab_[i]) v *= inv;
      tab_[i][j] = 1.0;
      rhs_[i] *= inv;
      basic_[i] = j;
    }
    n_ = sf_.num_cols;
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= 0) continue;
      for (auto& row : tab_) row.push_back(0.0);
      tab_[i][n_] = 1.0;
      basic_[i] = n_;
      ++n_;
      has_artificials_ = true;
    }
    frozen_.assign(n_, false);
    tab0_ = tab_;
    rhs0_ = rhs_;
    alive_.resize(m_);
    for (int i = 0; i < m_; ++i) alive_[i] = i;
  }

  void load_costs(std::vector<double> c) {
    costs_ = std::move(c);
    recompute_reduced();
  }

  void recompute_reduced() {
    red_ = costs_;
    for (int i = 0; i < m_; ++i) {
      double cb = costs_[basic_[i]];
      if (cb == 0.0) continue;
      const auto& row = tab_[i];
      for (int j = 0; j < n_; ++j) red_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) red_[basic_[i]] = 0.0;
  }

  double objective_value() const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += costs_[basic_[i]] * rhs_[i];
    return v;
  }

  void pivot(int row, int col) {
    auto& prow = tab_[row];
    double inv = 1.0 / prow[col];
    for (double& v : prow) v *= inv;
    rhs_[row] *= inv;
    prow[col] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = tab_[i][col];
      if (f == 0.0) continue;
      auto& irow = tab_[i];
      for (int j = 0; j < n_; ++j) irow[j] -= f * prow[j];
      irow[col] = 0.0;
      rhs_[i] -= f * rhs_[row];
      if (rhs_[i] < 0 && rhs_[i] > -1e-11) rhs_[i] = 0.0;
    }
    double f = red_[col];
    if (f != 0.0) {
      for (int j = 0; j < n_; ++j) red_[j] -= f * prow[j];
      red_[col] = 0.0;
    }
    basic_[row] = col;
  }

  Status iterate(bool phase1) {
    const long max_iters = 200L * (m_ + n_) + 10000;
    long stall = 0;
    bool bland = false;
    double last_obj = objective_value();
    for (long it = 0; it < max_iters; ++it) {
      if ((it & 255) == 255) recompute_reduced();
      int enter = -1;
      if (bland) {
        for (int j = 0; j < n_; ++j)
          if (!frozen_[j] && red_[j] < -kOptTol) {
            enter = j;
            break;
          }
      } else {
        double best = -kOptTol;
        for (int j = 0; j < n_; ++j)
          if (!frozen_[j] && red_[j] < best) {
            best = red_[j];
            enter = j;
          }
      }
      if (enter < 0) return Status::kOptimal;

      int leave = -1;
      double best_t = kInf, best_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        double a = tab_[i][enter];
        if (a <= kPivTol) continue;
        double t = rhs_[i] / a;
        if (leave < 0 || t < best_t - 1e-12 ||
            (t < best_t + 1e-12 && (bland ? basic_[i] < basic_[leave] : a > best_piv))) {
          leave = i;
          best_t = t;
          best_piv = a;
        }
      }
      if (leave < 0) return phase1 ? Status::kIterationLimit : Status::kUnbounded;

      pivot(leave, enter);
      double obj = objective_value();
      if (obj < last_obj - 1e-13) {
        stall = 0;
        last_obj = obj;
      } else if (++stall > 2L * (m_ + n_)) {
        bland = true;
      }
    }
    return Status::kIterationLimit;
  }

  // Pivot zero-valued artificials out of the basis, drop redundant rows, and
  // bar artificial columns from re-entering.
  void purge_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] < sf_.num_cols) continue;
      int col = -1;
      double best = kPivTol;
      for (int j = 0; j < sf_.num_cols; ++j)
        if (std::abs(tab_[i][j]) > best) {
          best = std::abs(tab_[i][j]);
          col = j;
        }
      if (col >= 0) pivot(i, col);
    }
    std::vector<int> keep;
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < sf_.num_cols) keep.push_back(i);
    if (static_cast<int>(keep.size()) != m_) {
      std::vector<std::vector<double>> tab2;
      std::vector<double> rhs2;
      std::vector<int> basic2, alive2;
      for (int i : keep) {
        tab2.push_back(std::move(tab_[i]));
        rhs2.push_back(rhs_[i]);
        basic2.push_back(basic_[i]);
        alive2.push_back(alive_[i]);
      }
      tab_ = std::move(tab2);
      rhs_ = std::move(rhs2);
      basic_ = std::move(basic2);
      alive_ = std::move(alive2);
      m_ = static_cast<int>(basic_.size());
    }
    for (int j = sf_.num_cols; j < n_; ++j) frozen_[j] = true;
  }

  void refine_basics() {
    Eigen::MatrixXd B(m_, m_);
    Eigen::VectorXd b(m_);
    for (int i = 0; i < m_; ++i) {
      int r = alive_[i];
      b(i) = rhs0_[r];
      for (int k = 0; k < m_; ++k) {
        int col = basic_[k];
        B(i, k) = col < static_cast<int>(tab0_[r].size()) ? tab0_[r][col] : 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd xb = lu.solve(b);
    if (!xb.allFinite()) return;
    for (int i = 0; i < m_; ++i)
      if (xb(i) > -kFeasTol) rhs_[i] = xb(i);
  }
};

}  // namespace

Solution solve(const Problem& p) {
  StandardForm sf = build_standard_form(p);
  std::vector<double> costs(sf.num_cols, 0.0);
  for (int j = 0; j < p.num_vars; ++j) {
    const VarMap& vm = sf.maps[j];
    double c = p.objective[j];
    switch (vm.kind) {
      case VarMap::kFixed: break;  // constant term, irrelevant to argmin
      case VarMap::kShifted: costs[vm.col] += c; break;
      case VarMap::kNegated: costs[vm.col] -= c; break;
      case VarMap::kFree:
        costs[vm.col] += c;
        costs[vm.col_neg] -= c;
        break;
    }
  }

  Simplex simplex(sf);
  Solution sol;
  sol.status = simplex.run(costs);
  if (sol.status != Status::kOptimal) return sol;

  std::vector<double> x = simplex.extract();
  sol.z.resize(p.num_vars);
  for (int j = 0; j < p.num_vars; ++j) {
    const VarMap& vm = sf.maps[j];
    switch (vm.kind) {
      case VarMap::kFixed: sol.z[j] = vm.shift; break;
      case VarMap::kShifted: sol.z[j] = vm.shift + x[vm.col]; break;
      case VarMap::kNegated: sol.z[j] = vm.shift - x[vm.col]; break;
      case VarMap::kFree: sol.z[j] = x[vm.col] - x[vm.col_neg]; break;
    }
  }
  sol.objective = 0.0;
  for (int j = 0; j < p.num_vars; ++j) sol.objective += p.objective[j] * sol.z[j];
  return sol;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration-limit";
  }
  return "?";
}

}  // namespace wardrop::lp
