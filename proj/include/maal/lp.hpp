#ifndef MAAL_LP_HPP
#define MAAL_LP_HPP

#include "maal/common.hpp"

namespace maal {

/// Dense linear program
///   minimize    c'x
///   subject to  A_ub x <= b_ub,  A_eq x = b_eq,  lb <= x <= ub
/// Bounds may be +-infinity. All problems solved here are desk-scale
/// (tens of variables), so a dense two-phase simplex is enough.
struct LpProblem {
  Vector c;
  Matrix A_ub;
  Vector b_ub;
  Matrix A_eq;
  Vector b_eq;
  Vector lb;
  Vector ub;

  static LpProblem with_vars(int n);
  int num_vars() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  bool optimal() const { return status == LpStatus::Optimal; }
};

LpSolution solve_lp(const LpProblem& prob);

}  // namespace maal

#endif  // MAAL_LP_HPP
