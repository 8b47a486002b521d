#include "maal/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace maal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Standard-form tableau  min c'u  s.t.  T u = rhs,  u >= 0.
// Two-phase primal simplex with Bland's rule; sizes here are tiny, so the
// dense full-tableau variant is fine.
struct Tableau {
  Matrix T;            // m x n
  Vector rhs;          // m, kept >= 0
  Vector cost;         // n
  std::vector<int> basis;  // m, column index of the basic variable per row
  int enter_limit = -1;    // columns >= limit may not enter (phase-2 artificials)

  int m() const { return static_cast<int>(T.rows()); }
  int n() const { return static_cast<int>(T.cols()); }

  void pivot(int row, int col) {
    const double p = T(row, col);
    T.row(row) /= p;
    rhs(row) /= p;
    for (int r = 0; r < m(); ++r) {
      if (r == row) continue;
      const double f = T(r, col);
      if (f != 0.0) {
        T.row(r) -= f * T.row(row);
        rhs(r) -= f * rhs(row);
      }
    }
    basis[static_cast<size_t>(row)] = col;
  }

  // Runs simplex on `cost`; returns false when unbounded.
  bool iterate(long max_iters) {
    Vector y(m());
    for (long it = 0; it < max_iters; ++it) {
      // reduced costs via the basic-cost combination
      for (int r = 0; r < m(); ++r) y(r) = cost(basis[static_cast<size_t>(r)]);
      const int last = enter_limit >= 0 ? enter_limit : n();
      int enter = -1;
      for (int j = 0; j < last; ++j) {
        const double red = cost(j) - y.dot(T.col(j));
        if (red < -kFeasTol) {  // Bland: first improving index
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best_ratio = kInf;
      for (int r = 0; r < m(); ++r) {
        const double a = T(r, enter);
        if (a > kPivotTol) {
          const double ratio = rhs(r) / a;
          if (ratio < best_ratio - 1e-15 ||
              (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 &&
               basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded direction
      pivot(leave, enter);
    }
    throw Error("lp: simplex iteration limit exceeded");
  }
};

struct VarMap {
  // x_j = shift + sign*u_pos [- u_neg when free]
  double shift = 0.0;
  double sign = 1.0;
  int pos = -1;
  int neg = -1;  // only for fully free variables
};

}  // namespace

LpProblem LpProblem::with_vars(int n) {
  LpProblem p;
  p.c = Vector::Zero(n);
  p.A_ub = Matrix::Zero(0, n);
  p.b_ub = Vector::Zero(0);
  p.A_eq = Matrix::Zero(0, n);
  p.b_eq = Vector::Zero(0);
  p.lb = Vector::Constant(n, -kInf);
  p.ub = Vector::Constant(n, kInf);
  return p;
}

LpSolution solve_lp(const LpProblem& prob) {
  const int n = prob.num_vars();
  if (n == 0) throw Error("lp: empty problem");
  if (prob.A_ub.cols() != n || prob.A_eq.cols() != n || prob.lb.size() != n ||
      prob.ub.size() != n)
    throw Error("lp: inconsistent dimensions");
  for (int j = 0; j < n; ++j)
    if (prob.lb(j) > prob.ub(j)) return {LpStatus::Infeasible, Vector(), 0.0};

  // Variable substitution to u >= 0, collecting extra ub rows.
  std::vector<VarMap> vmap(static_cast<size_t>(n));
  int ncols = 0;
  std::vector<std::pair<int, double>> ub_rows;  // (u column, upper value)
  for (int j = 0; j < n; ++j) {
    VarMap& v = vmap[static_cast<size_t>(j)];
    const double lo = prob.lb(j), hi = prob.ub(j);
    if (std::isfinite(lo)) {
      v.shift = lo;
      v.sign = 1.0;
      v.pos = ncols++;
      if (std::isfinite(hi)) ub_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.shift = hi;
      v.sign = -1.0;
      v.pos = ncols++;
    } else {
      v.pos = ncols++;
      v.neg = ncols++;
    }
  }

  const int m_ub = static_cast<int>(prob.A_ub.rows());
  const int m_eq = static_cast<int>(prob.A_eq.rows());
  const int m_bx = static_cast<int>(ub_rows.size());
  const int m = m_ub + m_bx + m_eq;
  const int n_slack = m_ub + m_bx;

  Matrix A = Matrix::Zero(m, ncols + n_slack);
  Vector b = Vector::Zero(m);
  Vector cost = Vector::Zero(ncols + n_slack);

  auto emit_row = [&](int row, const Eigen::RowVectorXd& coeffs, double rhs_val) {
    for (int j = 0; j < n; ++j) {
      const VarMap& v = vmap[static_cast<size_t>(j)];
      const double a = coeffs(j);
      if (a == 0.0) continue;
      A(row, v.pos) += a * v.sign;
      if (v.neg >= 0) A(row, v.neg) -= a;
      rhs_val -= a * v.shift;
    }
    b(row) = rhs_val;
  };

  for (int r = 0; r < m_ub; ++r) {
    emit_row(r, prob.A_ub.row(r), prob.b_ub(r));
    A(r, ncols + r) = 1.0;
  }
  for (int k = 0; k < m_bx; ++k) {
    const int row = m_ub + k;
    A(row, ub_rows[static_cast<size_t>(k)].first) = 1.0;
    A(row, ncols + m_ub + k) = 1.0;
    b(row) = ub_rows[static_cast<size_t>(k)].second;
  }
  for (int r = 0; r < m_eq; ++r) emit_row(m_ub + m_bx + r, prob.A_eq.row(r), prob.b_eq(r));

  for (int j = 0; j < n; ++j) {
    const VarMap& v = vmap[static_cast<size_t>(j)];
    cost(v.pos) += prob.c(j) * v.sign;
    if (v.neg >= 0) cost(v.neg) -= prob.c(j);
  }

  // Normalize rhs >= 0, then add artificials wherever the slack column can
  // no longer serve as the identity start.
  for (int r = 0; r < m; ++r) {
    if (b(r) < 0.0) {
      A.row(r) = -A.row(r);
      b(r) = -b(r);
    }
  }

  Tableau tab;
  std::vector<int> artificial_rows;
  for (int r = 0; r < m; ++r) {
    const bool slack_usable = r < n_slack && A(r, ncols + r) > 0.5;
    if (!slack_usable) artificial_rows.push_back(r);
  }
  const int n_art = static_cast<int>(artificial_rows.size());
  tab.T = Matrix::Zero(m, ncols + n_slack + n_art);
  tab.T.leftCols(ncols + n_slack) = A;
  tab.rhs = b;
  tab.basis.assign(static_cast<size_t>(m), -1);
  for (int r = 0; r < n_slack; ++r)
    if (A(r, ncols + r) > 0.5) tab.basis[static_cast<size_t>(r)] = ncols + r;
  for (int k = 0; k < n_art; ++k) {
    const int r = artificial_rows[static_cast<size_t>(k)];
    tab.T(r, ncols + n_slack + k) = 1.0;
    tab.basis[static_cast<size_t>(r)] = ncols + n_slack + k;
  }

  const long max_iters = 2000L * (m + tab.n() + 10);

  if (n_art > 0) {
    tab.cost = Vector::Zero(tab.n());
    tab.cost.tail(n_art).setOnes();
    if (!tab.iterate(max_iters)) throw Error("lp: phase-1 unbounded (internal)");
    double phase1 = 0.0;
    for (int r = 0; r < m; ++r)
      if (tab.basis[static_cast<size_t>(r)] >= ncols + n_slack) phase1 += tab.rhs(r);
    if (phase1 > kFeasTol * (1.0 + b.lpNorm<Eigen::Infinity>()))
      return {LpStatus::Infeasible, Vector(), 0.0};
    // pivot remaining (degenerate) artificials out where possible
    for (int r = 0; r < m; ++r) {
      if (tab.basis[static_cast<size_t>(r)] < ncols + n_slack) continue;
      int col = -1;
      for (int j = 0; j < ncols + n_slack; ++j)
        if (std::abs(tab.T(r, j)) > 1e-7) {
          col = j;
          break;
        }
      if (col >= 0) tab.pivot(r, col);
      // else: redundant row; its artificial stays basic at value ~0
    }
  }

  tab.cost = Vector::Zero(tab.n());
  tab.cost.head(ncols + n_slack) = cost;
  tab.enter_limit = ncols + n_slack;  // artificials may not re-enter
  if (!tab.iterate(max_iters)) return {LpStatus::Unbounded, Vector(), 0.0};

  Vector u = Vector::Zero(tab.n());
  for (int r = 0; r < m; ++r) u(tab.basis[static_cast<size_t>(r)]) = tab.rhs(r);
  Vector x(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& v = vmap[static_cast<size_t>(j)];
    double val = v.shift + v.sign * u(v.pos);
    if (v.neg >= 0) val -= u(v.neg);
    x(j) = val;
  }
  return {LpStatus::Optimal, x, prob.c.dot(x)};
}

}  // namespace maal
