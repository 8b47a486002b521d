// Serial vs OpenMP timing for the data-parallel kernels: the per-player
// sweep of the ascent loop, the pairwise stability grid sweep, and the
// coupling-inequality sampler. The serial path is the reference; outputs are
// asserted bit-identical before any timing is reported.

#include <chrono>
#include <cstdio>
#include <random>

#include "maal/engine.hpp"
#include "maal/equilibrium.hpp"
#include "maal/mirror.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace maal;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

// synthetic crowd: n quadratic players on [0,1]^d, each reacting to the
// aggregate load, coupled by one sum row. Every gradient oracle scans the
// whole profile, which is the realistic per-player observation cost.
Game crowd_game(int n, int d) {
  std::vector<PlayerSpec> players;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.4, 1.2);
  for (int i = 0; i < n; ++i) {
    const double pull = u(rng);
    players.emplace_back(i, ActionSet::box(Vector::Zero(d), Vector::Ones(d)),
                         [pull, i, n](const Profile& x) {
                           Vector load = Vector::Zero(x[static_cast<size_t>(i)].size());
                           for (const auto& xj : x) load += xj;
                           Vector g = Vector::Constant(x[static_cast<size_t>(i)].size(), pull);
                           g -= 2.0 * x[static_cast<size_t>(i)];
                           g -= (0.5 / n) * load;
                           return g;
                         });
  }
  Matrix a = Matrix::Ones(1, n * d);
  Vector b = Vector::Constant(1, 0.35 * n * d);
  return Game(std::move(players), AffineConstraint(a, b, std::vector<int>(n, d)));
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  if (a.points.size() != b.points.size()) return false;
  for (size_t k = 0; k < a.points.size(); ++k)
    if (a.points[k].x_flat != b.points[k].x_flat ||
        a.points[k].lambda != b.points[k].lambda)
      return false;
  return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: unavailable (serial timings only)\n");
#endif

  // 1. ascent loop over many players
  {
    const int players = 128, dim = 8;
    const Game game = crowd_game(players, dim);
    std::vector<Regularizer> regs;
    for (int i = 0; i < players; ++i)
      regs.push_back(Regularizer::euclidean(game.player(i).action_set));
    const Schedule sched = Schedule::harmonic(1.0, 1.0);

    RunConfig serial;
    serial.horizon = 500;
    serial.stride = 250;
    serial.record_ledger = false;
    serial.allow_unvalidated_schedule = true;
    RunConfig parallel = serial;
    parallel.mode = ExecMode::Parallel;

    RunResult rs, rp;
    const double ts = time_best_of(3, [&] {
      rs = run(game, regs, sched, zero_duals(game), Vector::Zero(1), serial);
    });
    const double tp = time_best_of(3, [&] {
      rp = run(game, regs, sched, zero_duals(game), Vector::Zero(1), parallel);
    });
    std::printf("ascent loop   (%d players x %d dims, T=500):  serial %.3fs  omp %.3fs  speedup %.2fx  identical %s\n",
                players, dim, ts, tp, ts / tp,
                same_trajectory(rs.trajectory, rp.trajectory) ? "yes" : "NO");
  }

  // 2. pairwise stability sweep on a 2-d grid
  {
    const DiscretizedSet grid = discretize_set(
        ActionSet::box(Vector::Constant(2, -1.0), Vector::Ones(2)), 0.02);
    Vector z0(2);
    z0 << 0.2, -0.3;
    const auto field = [&](const Vector& z) { return Vector(-(z - z0)); };
    VsSolReport a, b;
    const double ts = time_best_of(3, [&] { a = check_vs_equals_sol(field, grid, 1.0, ExecMode::Serial); });
    const double tp = time_best_of(3, [&] { b = check_vs_equals_sol(field, grid, 1.0, ExecMode::Parallel); });
    std::printf("vs/sol sweep  (%zu grid points, pairwise):     serial %.3fs  omp %.3fs  speedup %.2fx  identical %s\n",
                grid.points.size(), ts, tp, ts / tp,
                (a.sol_members == b.sol_members && a.vs_members == b.vs_members) ? "yes" : "NO");
  }

  // 3. coupling-inequality sampler
  {
    const Regularizer ent = Regularizer::entropic(8);
    DiagnosticReport a, b;
    const double ts = time_best_of(3, [&] { a = check_proposition1(ent, 200000, 7, ExecMode::Serial); });
    const double tp = time_best_of(3, [&] { b = check_proposition1(ent, 200000, 7, ExecMode::Parallel); });
    std::printf("prop-1 sweep  (2e5 triples, entropic d=8):     serial %.3fs  omp %.3fs  speedup %.2fx  identical %s\n",
                ts, tp, ts / tp,
                (a.max_violation == b.max_violation && a.violations == b.violations) ? "yes" : "NO");
  }
  return 0;
}
