#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "maal/lp.hpp"

using namespace maal;

namespace {

// Independent oracle at desk scale: enumerate every choice of d active
// hyperplanes (variable bounds and inequality rows), keep the feasible
// intersections, take the best objective. Valid for bounded problems.
struct VertexOracle {
  bool feasible = false;
  double value = 0.0;
};

VertexOracle brute_force_min(const LpProblem& p) {
  const int d = p.num_vars();
  std::vector<Eigen::RowVectorXd> planes;
  std::vector<double> rhs;
  for (int j = 0; j < d; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(d);
    e(j) = 1.0;
    if (std::isfinite(p.lb(j))) {
      planes.push_back(e);
      rhs.push_back(p.lb(j));
    }
    if (std::isfinite(p.ub(j))) {
      planes.push_back(e);
      rhs.push_back(p.ub(j));
    }
  }
  for (int r = 0; r < p.A_ub.rows(); ++r) {
    planes.push_back(p.A_ub.row(r));
    rhs.push_back(p.b_ub(r));
  }
  for (int r = 0; r < p.A_eq.rows(); ++r) {
    planes.push_back(p.A_eq.row(r));
    rhs.push_back(p.b_eq(r));
  }
  const int n = static_cast<int>(planes.size());

  VertexOracle out;
  std::vector<int> pick(static_cast<size_t>(d), 0);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d) {
      Matrix m(d, d);
      Vector v(d);
      for (int k = 0; k < d; ++k) {
        m.row(k) = planes[static_cast<size_t>(pick[static_cast<size_t>(k)])];
        v(k) = rhs[static_cast<size_t>(pick[static_cast<size_t>(k)])];
      }
      const Eigen::FullPivLU<Matrix> lu(m);
      if (!lu.isInvertible()) return;
      const Vector x = lu.solve(v);
      // feasibility of the candidate vertex
      for (int j = 0; j < d; ++j)
        if (x(j) < p.lb(j) - 1e-8 || x(j) > p.ub(j) + 1e-8) return;
      if (p.A_ub.rows() > 0 && ((p.A_ub * x - p.b_ub).maxCoeff() > 1e-8)) return;
      if (p.A_eq.rows() > 0 &&
          (p.A_eq * x - p.b_eq).lpNorm<Eigen::Infinity>() > 1e-8)
        return;
      const double val = p.c.dot(x);
      if (!out.feasible || val < out.value) out.value = val;
      out.feasible = true;
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[static_cast<size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace

TEST_CASE("maximize x+y on the unit box under x+y <= 1") {
  LpProblem p = LpProblem::with_vars(2);
  p.c << -1.0, -1.0;
  p.A_ub = Matrix::Ones(1, 2);
  p.b_ub = Vector::Ones(1);
  p.lb.setZero();
  p.ub.setOnes();
  const LpSolution s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.value == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK((p.A_ub * s.x - p.b_ub).maxCoeff() <= 1e-9);
}

TEST_CASE("equality-constrained selection on the simplex") {
  LpProblem p = LpProblem::with_vars(3);
  p.c << 3.0, 1.0, 2.0;
  p.A_eq = Matrix::Ones(1, 3);
  p.b_eq = Vector::Ones(1);
  p.lb.setZero();
  p.ub.setOnes();
  const LpSolution s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.x(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded detection") {
  LpProblem p = LpProblem::with_vars(1);
  p.c << 1.0;
  p.A_ub = Matrix::Ones(1, 1);
  p.b_ub = Vector::Constant(1, -1.0);
  p.lb.setZero();
  CHECK(solve_lp(p).status == LpStatus::Infeasible);

  LpProblem q = LpProblem::with_vars(1);
  q.c << -1.0;
  q.lb.setZero();  // no upper bound, no rows
  CHECK(solve_lp(q).status == LpStatus::Unbounded);
}

TEST_CASE("free variables via row constraints") {
  LpProblem p = LpProblem::with_vars(2);
  p.c << 1.0, 0.0;
  p.A_ub = Matrix::Zero(2, 2);
  p.A_ub << -1.0, 0.0, 0.0, 1.0;  // -x <= 5, y <= 2
  p.b_ub = Vector::Zero(2);
  p.b_ub << 5.0, 2.0;
  const LpSolution s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.value == doctest::Approx(-5.0).epsilon(1e-10));
}

TEST_CASE("negative right-hand sides exercise the artificial phase") {
  // x >= 2 written as -x <= -2, minimize x
  LpProblem p = LpProblem::with_vars(1);
  p.c << 1.0;
  p.A_ub = Matrix::Constant(1, 1, -1.0);
  p.b_ub = Vector::Constant(1, -2.0);
  p.lb.setZero();
  p.ub.setConstant(10.0);
  const LpSolution s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("random boxes with random rows agree with the vertex oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 2);  // 2 or 3
    const int rows = 1 + static_cast<int>(rng() % 3);
    LpProblem p = LpProblem::with_vars(d);
    p.c = Vector::NullaryExpr(d, [&](Eigen::Index) { return u(rng); });
    p.lb = Vector::NullaryExpr(d, [&](Eigen::Index) { return -1.0 + 0.5 * u(rng); });
    p.ub = p.lb + Vector::NullaryExpr(d, [&](Eigen::Index) { return 1.0 + u(rng) * 0.5; });
    p.A_ub = Matrix::NullaryExpr(rows, d, [&](Eigen::Index, Eigen::Index) { return u(rng); });
    p.b_ub = Vector::NullaryExpr(rows, [&](Eigen::Index) { return 0.5 * u(rng); });

    const VertexOracle oracle = brute_force_min(p);
    const LpSolution s = solve_lp(p);
    if (oracle.feasible) {
      REQUIRE(s.optimal());
      CHECK(s.value == doctest::Approx(oracle.value).epsilon(1e-6));
      ++solved;
    } else {
      CHECK(s.status == LpStatus::Infeasible);
    }
  }
  CHECK(solved > 100);  // the generator should produce mostly feasible cases
}
