#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "maal/equilibrium.hpp"
#include "maal/oracle.hpp"
#include "maal/scenarios.hpp"

using namespace maal;

namespace {

// one player on [0,1], gradient 1-2x, slack coupling row (Q = [0,1])
Game scalar_game(double b = 2.0) {
  std::vector<PlayerSpec> players;
  players.emplace_back(
      0, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
      [](const Profile& x) { return Vector(Vector::Constant(1, 1.0 - 2.0 * x[0](0))); },
      [](const Profile& x) { return x[0](0) - x[0](0) * x[0](0); });
  Matrix a(1, 1);
  a << 1.0;
  return Game(std::move(players), AffineConstraint(a, Vector::Constant(1, b), {1}));
}

}  // namespace

TEST_CASE("extended operator blocks") {
  const Game game = builtin("lq2").build_game();
  const ExtendedOperator op(game);
  const Profile x = {Vector::Constant(1, 0.3), Vector::Constant(1, 0.4)};

  // lambda = 0: primal block is the bare gradient
  const Vector p0 = op.primal(x, Vector::Zero(1));
  const Vector v = game.gradients_flat(x);
  CHECK((p0 - v).norm() == 0.0);

  // active constraint: dual block vanishes
  const Profile on_row = {Vector::Constant(1, 0.5), Vector::Constant(1, 0.5)};
  CHECK(op.dual(on_row).norm() <= 1e-15);

  // stacked evaluation agrees with the blocks
  Vector z(3);
  z << 0.3, 0.4, 0.7;
  const Vector full = op.full(z);
  CHECK((full.head(2) - op.primal(x, Vector::Constant(1, 0.7))).norm() == 0.0);
  CHECK(full(2) == doctest::Approx(0.3 + 0.4 - 1.0));
}

TEST_CASE("vi residual vanishes for a zero operator") {
  std::vector<PlayerSpec> players;
  players.emplace_back(0, ActionSet::box(Vector::Zero(2), Vector::Ones(2)),
                       [](const Profile&) { return Vector::Zero(2).eval(); });
  Matrix a(1, 2);
  a << 1.0, 1.0;
  Game game(std::move(players), AffineConstraint(a, Vector::Constant(1, 5.0), {2}));
  const Profile x = {Vector::Constant(2, 0.37)};
  CHECK(std::abs(vi_residual_feasible(game, x).value) <= 1e-12);
}

TEST_CASE("scalar game: residual is zero exactly at the interior solution") {
  const Game game = scalar_game();
  CHECK(std::abs(vi_residual_feasible(game, {Vector::Constant(1, 0.5)}).value) <= 1e-10);
  // off the solution the residual is the expected positive gap
  const double r = vi_residual_feasible(game, {Vector::Constant(1, 0.3)}).value;
  CHECK(r == doctest::Approx(0.28).epsilon(1e-9));  // max (x-0.3)*0.4 over [0,1]
}

TEST_CASE("extended residual certifies the oracle KKT point") {
  const Game game = builtin("lq2").build_game();
  const KktSolution sol = solve_lq_kkt(game);
  const ViResidual r = vi_residual_extended(game, sol.x, sol.lambda, 4.0);
  CHECK(r.value <= 1e-8);

  // grid confirmation of <z - z*, v~(z*)> <= 0 over Q-grid x price-grid
  const Vector fx = ExtendedOperator(game).primal(sol.x, sol.lambda);
  const Vector fl = ExtendedOperator(game).dual(sol.x);
  const Vector xs = concat_profile(sol.x);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int l = 0; l <= 20; ++l) {
        Vector z(2);
        z << i / 20.0, j / 20.0;
        const double lam = 4.0 * l / 20.0;
        const double inner = (z - xs).dot(fx) + (lam - sol.lambda(0)) * fl(0);
        CHECK(inner <= 1e-8);
      }
    }
  }
}

TEST_CASE("nash grid check certifies the unconstrained maximizer") {
  // u = -(x-0.3)^2 on [0,1] with a slack row
  std::vector<PlayerSpec> players;
  players.emplace_back(
      0, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
      [](const Profile& x) { return Vector(-2.0 * (x[0].array() - 0.3)); },
      [](const Profile& x) { return -std::pow(x[0](0) - 0.3, 2); });
  Matrix a(1, 1);
  a << 1.0;
  Game game(std::move(players), AffineConstraint(a, Vector::Constant(1, 2.0), {1}));

  const NashReport at_opt = check_nash(game, {Vector::Constant(1, 0.3)}, 1e-2);
  CHECK(at_opt.certified);
  CHECK(at_opt.improvements[0] <= at_opt.tolerance);

  const NashReport off_opt = check_nash(game, {Vector::Constant(1, 0.8)}, 1e-2);
  CHECK_FALSE(off_opt.certified);
  CHECK(off_opt.improvements[0] > 0.2);  // (0.5)^2 - grid slack
}

TEST_CASE("nash check needs utilities and feasibility") {
  std::vector<PlayerSpec> players;
  players.emplace_back(0, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
                       [](const Profile&) { return Vector::Zero(1).eval(); });
  Matrix a(1, 1);
  a << 1.0;
  Game no_util(std::move(players), AffineConstraint(a, Vector::Ones(1), {1}));
  CHECK_THROWS_AS(check_nash(no_util, {Vector::Constant(1, 0.5)}, 1e-2), Error);

  const Game game = scalar_game(0.25);
  CHECK_THROWS_AS(check_nash(game, {Vector::Constant(1, 0.9)}, 1e-2), Error);
}

TEST_CASE("nash check respects the coupled budget") {
  // both players want 0.75 but share x1 + x2 <= 1; at the oracle point no
  // feasible unilateral deviation helps
  const Game game = builtin("lq2").build_game();
  const KktSolution sol = solve_lq_kkt(game);
  const NashReport rep = check_nash(game, sol.x, 1e-2);
  CHECK(rep.certified);
}

TEST_CASE("vs and sol grids coincide for the gradient of a concave function") {
  // F = d/dx of -(x-0.4)^2 on [0,1]
  const DiscretizedSet grid = discretize_set(ActionSet::box(Vector::Zero(1), Vector::Ones(1)), 1e-2);
  const auto op = [](const Vector& x) { return Vector(-2.0 * (x.array() - 0.4)); };
  const VsSolReport rep = check_vs_equals_sol(op, grid);
  CHECK(rep.equal);
  CHECK_FALSE(rep.vs_empty);
  CHECK(rep.hausdorff <= 5e-2);
  // both sets concentrate at the maximizer
  for (long k : rep.sol_members)
    CHECK(std::abs(grid.points[static_cast<size_t>(k)](0) - 0.4) <= 3e-2);
  for (long k : rep.vs_members)
    CHECK(std::abs(grid.points[static_cast<size_t>(k)](0) - 0.4) <= 3e-2);
}

TEST_CASE("vs and sol grids coincide for a strictly monotone linear field") {
  const DiscretizedSet grid = discretize_set(
      ActionSet::box(Vector::Constant(2, -1.0), Vector::Ones(2)), 0.05);
  Vector z0(2);
  z0 << 0.25, -0.5;
  const auto op = [z0](const Vector& z) { return Vector(-(z - z0)); };
  const VsSolReport rep = check_vs_equals_sol(op, grid);
  CHECK(rep.equal);
  CHECK(rep.hausdorff <= 0.25);
  // stability blob radius is ~2h, solution blob ~h: all members near the zero
  for (long k : rep.vs_members)
    CHECK((grid.points[static_cast<size_t>(k)] - z0).norm() <= 0.13);
  for (long k : rep.sol_members)
    CHECK((grid.points[static_cast<size_t>(k)] - z0).norm() <= 0.13);
}

TEST_CASE("non-monotone field: stability set empty, solution set not") {
  // F(x) = x^2 - 0.25 on [-1,1]: SOL contains {-0.5, 0.5, 1}, VS is empty
  const DiscretizedSet grid = discretize_set(
      ActionSet::box(Vector::Constant(1, -1.0), Vector::Ones(1)), 1e-2);
  const auto op = [](const Vector& x) { return Vector(x.array().square() - 0.25); };
  const VsSolReport rep = check_vs_equals_sol(op, grid);
  CHECK(rep.vs_empty);
  CHECK_FALSE(rep.equal);
  CHECK_FALSE(rep.sol_members.empty());
  CHECK(rep.symmetric_difference > 0);
}

TEST_CASE("parallel and serial grid sweeps agree bit for bit") {
  const DiscretizedSet grid = discretize_set(
      ActionSet::box(Vector::Constant(2, -1.0), Vector::Ones(2)), 0.05);
  Vector z0(2);
  z0 << 0.1, 0.2;
  const auto op = [z0](const Vector& z) { return Vector(-(z - z0)); };
  const VsSolReport a = check_vs_equals_sol(op, grid, 1.0, ExecMode::Serial);
  const VsSolReport b = check_vs_equals_sol(op, grid, 1.0, ExecMode::Parallel);
  CHECK(a.sol_members == b.sol_members);
  CHECK(a.vs_members == b.vs_members);
}

TEST_CASE("feasible-set grid respects the coupling rows") {
  const Game game = builtin("lq2").build_game();
  const DiscretizedSet grid = discretize_feasible(game, 0.05);
  CHECK(!grid.points.empty());
  for (const auto& p : grid.points) {
    CHECK(p.minCoeff() >= -1e-12);
    CHECK(p.maxCoeff() <= 1.0 + 1e-12);
    CHECK(p.sum() <= 1.0 + 1e-9);
  }
}

TEST_CASE("monotonicity spot check") {
  CHECK(check_monotone(builtin("lq2").build_game(), 500, 1).passed);
  CHECK(check_monotone(builtin("simplex_alloc").build_game(), 500, 2).passed);

  std::vector<PlayerSpec> players;
  players.emplace_back(0, ActionSet::box(Vector::Zero(2), Vector::Ones(2)),
                       [](const Profile& x) { return Vector(2.0 * x[0]); });
  Matrix a(1, 2);
  a << 1.0, 1.0;
  Game anti(std::move(players), AffineConstraint(a, Vector::Constant(1, 5.0), {2}));
  CHECK_FALSE(check_monotone(anti, 500, 3).passed);
}
