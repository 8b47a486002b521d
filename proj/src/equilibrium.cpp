#include "maal/equilibrium.hpp"

#include <cmath>

#include "maal/lp.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maal {

Vector ExtendedOperator::primal(const Profile& x, const Vector& lambda) const {
  const Profile v = game_->gradients(x);
  Vector out(game_->total_dim());
  for (int i = 0; i < game_->num_players(); ++i) {
    const auto& con = game_->constraint();
    out.segment(con.block_offset(i), con.block_dim(i)) =
        v[static_cast<size_t>(i)] - con.block(i).transpose() * lambda;
  }
  return out;
}

Vector ExtendedOperator::dual(const Profile& x) const { return game_->constraint().apply(x); }

Vector ExtendedOperator::full(const Vector& z) const {
  const int nx = game_->total_dim();
  const int m = game_->constraint().num_rows();
  if (z.size() != nx + m) throw Error("extended operator: bad stacked dimension");
  const Profile x = split_profile(z.head(nx), game_->dims());
  const Vector lambda = z.tail(m);
  Vector out(nx + m);
  out.head(nx) = primal(x, lambda);
  out.tail(m) = dual(x);
  return out;
}

ViResidual vi_residual_feasible(const Game& game, const Profile& x,
                                double feas_tol) {
  const Vector x_flat = concat_profile(x);
  const Vector slack = game.constraint().slack_violation(x_flat);
  if (slack.size() > 0 && slack.maxCoeff() > feas_tol)
    throw Error("vi_residual: point violates the coupling constraint");
  const Vector f = game.gradients_flat(x);

  LpProblem lp = feasible_region_lp(game);
  lp.c = -f;  // maximize <f, z>
  const LpSolution sol = solve_lp(lp);
  if (!sol.optimal())
    throw Error("vi_residual: LP over the feasible set failed (should be compact)");
  ViResidual r;
  r.attaining_point = sol.x;
  r.value = f.dot(sol.x - x_flat);
  return r;
}

ViResidual vi_residual_extended(const Game& game, const Profile& x,
                                const Vector& lambda, double lambda_cap) {
  if (!(lambda_cap > 0.0)) throw Error("vi_residual: lambda_cap must be positive");
  const ExtendedOperator op(game);
  const Vector fx = op.primal(x, lambda);
  const Vector fl = op.dual(x);

  double value = 0.0;
  Vector attain(game.total_dim() + game.constraint().num_rows());
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& con = game.constraint();
    const ActionSet& set = game.player(i).action_set;
    const Vector c = fx.segment(con.block_offset(i), con.block_dim(i));
    const Vector best = set.support_point(c);
    attain.segment(con.block_offset(i), con.block_dim(i)) = best;
    value += c.dot(best - x[static_cast<size_t>(i)]);
  }
  for (int m = 0; m < game.constraint().num_rows(); ++m) {
    const double best = fl(m) > 0.0 ? lambda_cap : 0.0;
    attain(game.total_dim() + m) = best;
    value += fl(m) * (best - lambda(m));
  }
  ViResidual r;
  r.value = value;
  r.attaining_point = attain;
  r.lambda_cap = lambda_cap;
  return r;
}

namespace {

// Per-factor grid at resolution h: full product for boxes (and filtered bbox
// grids for balls/polytopes), barycentric grid for the simplex.
std::vector<Vector> grid_points(const ActionSet& set, double h) {
  if (set.dim() > 3)
    throw Error("grid: dimension capped at 3 for brute-force sweeps");
  std::vector<Vector> pts;
  if (set.kind() == SetKind::Simplex) {
    const int k = std::max(1, static_cast<int>(std::lround(1.0 / h)));
    const int d = set.dim();
    // compositions of k into d parts
    std::vector<int> comp(static_cast<size_t>(d), 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == d - 1) {
        comp[static_cast<size_t>(pos)] = left;
        Vector p(d);
        for (int j = 0; j < d; ++j) p(j) = static_cast<double>(comp[static_cast<size_t>(j)]) / k;
        pts.push_back(p);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        comp[static_cast<size_t>(pos)] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, k);
    return pts;
  }

  const Vector lo = set.bbox_lower();
  const Vector hi = set.bbox_upper();
  const int d = set.dim();
  std::vector<long> counts(static_cast<size_t>(d));
  long total = 1;
  for (int j = 0; j < d; ++j) {
    counts[static_cast<size_t>(j)] =
        1 + static_cast<long>(std::floor((hi(j) - lo(j)) / h + 1e-9));
    total *= counts[static_cast<size_t>(j)];
    if (total > 4'000'000) throw Error("grid: too many points at this resolution");
  }
  pts.reserve(static_cast<size_t>(total));
  Vector p(d);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int j = 0; j < d; ++j) {
      const long kj = rem % counts[static_cast<size_t>(j)];
      rem /= counts[static_cast<size_t>(j)];
      p(j) = std::min(lo(j) + static_cast<double>(kj) * h, hi(j));
    }
    if (set.kind() == SetKind::Box || set.contains(p, 1e-9)) pts.push_back(p);
  }
  return pts;
}

}  // namespace

DiscretizedSet discretize_set(const ActionSet& set, double h) {
  if (!(h > 0.0)) throw Error("discretize: h must be positive");
  DiscretizedSet out;
  out.h = h;
  out.points = grid_points(set, h);
  return out;
}

DiscretizedSet discretize_feasible(const Game& game, double h) {
  if (!(h > 0.0)) throw Error("discretize: h must be positive");
  if (game.total_dim() > 3)
    throw Error("discretize_feasible: total dimension capped at 3");
  std::vector<std::vector<Vector>> factor_grids;
  for (int i = 0; i < game.num_players(); ++i)
    factor_grids.push_back(grid_points(game.player(i).action_set, h));

  DiscretizedSet out;
  out.h = h;
  std::vector<size_t> idx(factor_grids.size(), 0);
  while (true) {
    Vector p(game.total_dim());
    for (int i = 0; i < game.num_players(); ++i)
      p.segment(game.constraint().block_offset(i), game.constraint().block_dim(i)) =
          factor_grids[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
    if (game.constraint().slack_violation(p).maxCoeff() <= 1e-9) out.points.push_back(p);
    int pos = 0;
    while (pos < static_cast<int>(idx.size())) {
      if (++idx[static_cast<size_t>(pos)] < factor_grids[static_cast<size_t>(pos)].size())
        break;
      idx[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == static_cast<int>(idx.size())) break;
  }
  return out;
}

NashReport check_nash(const Game& game, const Profile& x, double grid_h,
                      double tolerance, ExecMode mode) {
  if (!game.has_utilities())
    throw Error("check_nash: every player needs a utility oracle");
  if (!(grid_h > 0.0)) throw Error("check_nash: grid resolution must be positive");
  const Vector x_flat = concat_profile(x);
  if (game.constraint().slack_violation(x_flat).maxCoeff() > 1e-6)
    throw Error("check_nash: profile is not feasible");

  NashReport rep;
  rep.tolerance = tolerance > 0.0 ? tolerance : 25.0 * grid_h * grid_h;
  rep.best_responses = x;
  rep.improvements.assign(static_cast<size_t>(game.num_players()), 0.0);

  for (int i = 0; i < game.num_players(); ++i) {
    const auto& con = game.constraint();
    // residual coupling budget once everyone else's action is fixed
    Vector budget = con.rhs();
    for (int j = 0; j < game.num_players(); ++j)
      if (j != i) budget -= con.block(j) * x[static_cast<size_t>(j)];

    const std::vector<Vector> candidates = grid_points(game.player(i).action_set, grid_h);
    const double u_now = game.player(i).utility(x);

    const long n = static_cast<long>(candidates.size());
    std::vector<double> vals(static_cast<size_t>(n),
                             -std::numeric_limits<double>::infinity());
    auto evaluate = [&](long c) {
      const Vector& xi = candidates[static_cast<size_t>(c)];
      if (((con.block(i) * xi) - budget).maxCoeff() > 1e-9)
        return -std::numeric_limits<double>::infinity();
      Profile trial = x;
      trial[static_cast<size_t>(i)] = xi;
      return game.player(i).utility(trial);
    };
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
      for (long c = 0; c < n; ++c) vals[static_cast<size_t>(c)] = evaluate(c);
    } else {
      for (long c = 0; c < n; ++c) vals[static_cast<size_t>(c)] = evaluate(c);
    }
    long best = -1;
    for (long c = 0; c < n; ++c)
      if (best < 0 || vals[static_cast<size_t>(c)] > vals[static_cast<size_t>(best)]) best = c;
    if (best >= 0 && std::isfinite(vals[static_cast<size_t>(best)])) {
      rep.improvements[static_cast<size_t>(i)] = vals[static_cast<size_t>(best)] - u_now;
      rep.best_responses[static_cast<size_t>(i)] = candidates[static_cast<size_t>(best)];
    }
  }
  rep.certified = true;
  for (double imp : rep.improvements) rep.certified = rep.certified && imp <= rep.tolerance;
  return rep;
}

namespace {

double one_sided_hausdorff(const std::vector<long>& from, const std::vector<long>& to,
                           const std::vector<Vector>& pts) {
  double worst = 0.0;
  for (long a : from) {
    double nearest = std::numeric_limits<double>::infinity();
    for (long b : to)
      nearest = std::min(nearest, (pts[static_cast<size_t>(a)] - pts[static_cast<size_t>(b)]).norm());
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace

VsSolReport check_vs_equals_sol(const std::function<Vector(const Vector&)>& op,
                                const DiscretizedSet& z, double tol_scale,
                                ExecMode mode) {
  const long n = static_cast<long>(z.points.size());
  if (n == 0) throw Error("check_vs_equals_sol: empty grid");

  std::vector<Vector> f(static_cast<size_t>(n));
  std::vector<double> self(static_cast<size_t>(n));
  for (long k = 0; k < n; ++k) {
    f[static_cast<size_t>(k)] = op(z.points[static_cast<size_t>(k)]);
    self[static_cast<size_t>(k)] = z.points[static_cast<size_t>(k)].dot(f[static_cast<size_t>(k)]);
  }
  double fmax = 0.0;
  for (const auto& g : f) fmax = std::max(fmax, g.lpNorm<Eigen::Infinity>());

  // monotonicity modulus estimate: -<dz, dF>/||dz||^2 over sampled pairs
  double modulus = std::numeric_limits<double>::infinity();
  const long stride = std::max(1L, n / 512);
  for (long a = 0; a < n; a += stride) {
    for (long b = a + stride; b < n; b += 7 * stride) {
      const Vector dz = z.points[static_cast<size_t>(a)] - z.points[static_cast<size_t>(b)];
      const double nz = dz.squaredNorm();
      if (nz < 1e-18) continue;
      modulus = std::min(modulus, -dz.dot(f[static_cast<size_t>(a)] - f[static_cast<size_t>(b)]) / nz);
    }
  }
  if (!std::isfinite(modulus)) modulus = 0.0;

  VsSolReport rep;
  rep.sol_tol = tol_scale * z.h * std::max(fmax, 1e-12);
  rep.vs_tol = std::max(modulus, 1e-9) * tol_scale * tol_scale * z.h * z.h;

  std::vector<double> sol_res(static_cast<size_t>(n)), vs_res(static_cast<size_t>(n));
  auto eval_point = [&](long k) {
    // SOL residual: max_w <w - z_k, F(z_k)>
    double best_sol = -std::numeric_limits<double>::infinity();
    const Vector& fk = f[static_cast<size_t>(k)];
    for (long j = 0; j < n; ++j)
      best_sol = std::max(best_sol, z.points[static_cast<size_t>(j)].dot(fk));
    sol_res[static_cast<size_t>(k)] = best_sol - z.points[static_cast<size_t>(k)].dot(fk);
    // VS residual: max_w <w - z_k, F(w)>
    double best_vs = -std::numeric_limits<double>::infinity();
    for (long j = 0; j < n; ++j)
      best_vs = std::max(best_vs,
                         self[static_cast<size_t>(j)] -
                             z.points[static_cast<size_t>(k)].dot(f[static_cast<size_t>(j)]));
    vs_res[static_cast<size_t>(k)] = best_vs;
  };
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) eval_point(k);
  } else {
    for (long k = 0; k < n; ++k) eval_point(k);
  }

  for (long k = 0; k < n; ++k) {
    const bool in_sol = sol_res[static_cast<size_t>(k)] <= rep.sol_tol;
    const bool in_vs = vs_res[static_cast<size_t>(k)] <= rep.vs_tol;
    if (in_sol) rep.sol_members.push_back(k);
    if (in_vs) rep.vs_members.push_back(k);
    if (in_sol != in_vs) ++rep.symmetric_difference;
  }
  rep.vs_empty = rep.vs_members.empty();
  if (rep.vs_empty || rep.sol_members.empty()) {
    rep.hausdorff = std::numeric_limits<double>::infinity();
    rep.equal = false;
  } else {
    rep.hausdorff = std::max(one_sided_hausdorff(rep.sol_members, rep.vs_members, z.points),
                             one_sided_hausdorff(rep.vs_members, rep.sol_members, z.points));
    rep.equal = rep.hausdorff <= 5.0 * z.h * std::max(1.0, tol_scale);
  }
  return rep;
}

DiagnosticReport check_monotone(const Game& game, long samples, std::uint64_t seed) {
  constexpr double kTol = 1e-9;
  auto rng = make_rng(seed);
  DiagnosticReport rep;
  for (long t = 0; t < samples; ++t) {
    const Profile x1 = game.sample_profile(rng);
    const Profile x2 = game.sample_profile(rng);
    const Vector d = concat_profile(x1) - concat_profile(x2);
    const Vector dv = game.gradients_flat(x1) - game.gradients_flat(x2);
    rep.record(d.dot(dv), kTol);
  }
  return rep;
}

}  // namespace maal
