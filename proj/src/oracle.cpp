#include "maal/oracle.hpp"

#include <cmath>

#include "maal/geometry.hpp"

namespace maal {

void fill_residuals(const Game& game, KktSolution& sol) {
  const auto& con = game.constraint();
  const Profile v = game.gradients(sol.x);

  double stat_sq = 0.0;
  double set_gap = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const ActionSet& set = game.player(i).action_set;
    const Vector& xi = sol.x[static_cast<size_t>(i)];
    const Vector adj = v[static_cast<size_t>(i)] - con.block(i).transpose() * sol.lambda;
    stat_sq += (project(set, xi + adj) - xi).squaredNorm();
    set_gap = std::max(set_gap, (project(set, xi) - xi).norm());
  }
  sol.stationarity = std::sqrt(stat_sq);

  const Vector slack = con.rhs() - con.matrix() * concat_profile(sol.x);
  double comp = 0.0;
  for (int m = 0; m < con.num_rows(); ++m)
    comp = std::max(comp, std::abs(sol.lambda(m) * slack(m)));
  // price must also sit in the orthant
  comp = std::max(comp, std::max(0.0, -sol.lambda.minCoeff()));
  sol.complementarity = comp;

  sol.feasibility = project_nonneg(-slack).norm() + set_gap;
}

AffineModel extract_affine_gradient(const Game& game, std::uint64_t seed) {
  const int n = game.total_dim();
  const auto eval_flat = [&](const Vector& flat) {
    return game.gradients_flat(split_profile(flat, game.dims()));
  };
  AffineModel model;
  model.q = eval_flat(Vector::Zero(n));
  model.p = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    model.p.col(j) = eval_flat(Vector::Unit(n, j)) - model.q;

  // verify affinity on random feasible-scale profiles
  auto rng = make_rng(seed);
  double scale = 1e-12;
  for (int t = 0; t < 16; ++t) {
    const Vector x = concat_profile(game.sample_profile(rng));
    const Vector predicted = model.p * x + model.q;
    const Vector actual = eval_flat(x);
    scale = std::max(scale, actual.lpNorm<Eigen::Infinity>());
    if ((predicted - actual).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + scale))
      throw Error("oracle: gradient oracle is not affine");
  }
  return model;
}

namespace {

int pow3(int k) {
  int r = 1;
  for (int i = 0; i < k; ++i) r *= 3;
  return r;
}

}  // namespace

KktSolution solve_lq_kkt(const Game& game) {
  const auto& con = game.constraint();
  const int n = game.total_dim();
  const int m = con.num_rows();
  if (n + m > 10)
    throw Error("solve_lq_kkt: active-set enumeration capped at total dim + rows <= 10");
  for (int i = 0; i < game.num_players(); ++i)
    if (game.player(i).action_set.kind() != SetKind::Box)
      throw Error("solve_lq_kkt: requires box action sets");

  const AffineModel model = extract_affine_gradient(game);
  // monotone game required: symmetric part of P negative semidefinite
  {
    const Matrix sym = 0.5 * (model.p + model.p.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.eigenvalues().maxCoeff() > 1e-9)
      throw Error("solve_lq_kkt: game is not monotone (P has positive symmetric part)");
  }

  Vector lb(n), ub(n);
  for (int i = 0; i < game.num_players(); ++i) {
    const ActionSet& set = game.player(i).action_set;
    lb.segment(con.block_offset(i), set.dim()) = set.lower();
    ub.segment(con.block_offset(i), set.dim()) = set.upper();
  }

  constexpr double kAccept = 1e-9;
  bool found = false;
  KktSolution best;

  const int faces = pow3(n);
  const long row_sets = 1L << m;
  for (int face = 0; face < faces; ++face) {
    // coordinate states: 0 free, 1 at lower, 2 at upper
    std::vector<int> state(static_cast<size_t>(n));
    {
      int rem = face;
      for (int j = 0; j < n; ++j) {
        state[static_cast<size_t>(j)] = rem % 3;
        rem /= 3;
      }
    }
    std::vector<int> free_idx;
    for (int j = 0; j < n; ++j)
      if (state[static_cast<size_t>(j)] == 0) free_idx.push_back(j);

    Vector x_fixed = Vector::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (state[static_cast<size_t>(j)] == 1) x_fixed(j) = lb(j);
      if (state[static_cast<size_t>(j)] == 2) x_fixed(j) = ub(j);
    }

    for (long rows = 0; rows < row_sets; ++rows) {
      std::vector<int> active;
      for (int r = 0; r < m; ++r)
        if ((rows >> r) & 1) active.push_back(r);

      const int nf = static_cast<int>(free_idx.size());
      const int na = static_cast<int>(active.size());
      const int dim = nf + na;
      Matrix sys = Matrix::Zero(dim, dim);
      Vector rhs = Vector::Zero(dim);

      // stationarity rows for free coordinates: (P x + q - A^T lambda)_j = 0
      for (int r = 0; r < nf; ++r) {
        const int j = free_idx[static_cast<size_t>(r)];
        for (int c = 0; c < nf; ++c)
          sys(r, c) = model.p(j, free_idx[static_cast<size_t>(c)]);
        for (int c = 0; c < na; ++c)
          sys(r, nf + c) = -con.matrix()(active[static_cast<size_t>(c)], j);
        rhs(r) = -model.q(j) - model.p.row(j).dot(x_fixed);
      }
      // active coupling rows: (A x)_r = b_r
      for (int r = 0; r < na; ++r) {
        const int row = active[static_cast<size_t>(r)];
        for (int c = 0; c < nf; ++c)
          sys(nf + r, c) = con.matrix()(row, free_idx[static_cast<size_t>(c)]);
        rhs(nf + r) = con.rhs()(row) - con.matrix().row(row).dot(x_fixed);
      }

      Vector u;
      if (dim > 0) {
        const Eigen::ColPivHouseholderQR<Matrix> qr(sys);
        u = qr.solve(rhs);
        if ((sys * u - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))
          continue;  // singular or inconsistent combination
      } else {
        u = Vector::Zero(0);
      }

      Vector x_flat = x_fixed;
      bool ok = true;
      for (int r = 0; r < nf; ++r) {
        const double xv = u(r);
        const int j = free_idx[static_cast<size_t>(r)];
        if (xv < lb(j) - 1e-10 || xv > ub(j) + 1e-10) {
          ok = false;
          break;
        }
        x_flat(j) = std::min(std::max(xv, lb(j)), ub(j));
      }
      if (!ok) continue;

      Vector lambda = Vector::Zero(m);
      for (int r = 0; r < na; ++r) {
        const double lv = u(nf + r);
        if (lv < -1e-10) {
          ok = false;
          break;
        }
        lambda(active[static_cast<size_t>(r)]) = std::max(lv, 0.0);
      }
      if (!ok) continue;

      // inactive rows must hold with slack, bound multipliers need the right sign
      const Vector slack = con.rhs() - con.matrix() * x_flat;
      if (slack.minCoeff() < -1e-10) continue;
      const Vector g = model.p * x_flat + model.q - con.matrix().transpose() * lambda;
      for (int j = 0; j < n && ok; ++j) {
        if (state[static_cast<size_t>(j)] == 1 && g(j) > 1e-9) ok = false;   // at lower
        if (state[static_cast<size_t>(j)] == 2 && g(j) < -1e-9) ok = false;  // at upper
      }
      if (!ok) continue;

      KktSolution cand;
      cand.x = split_profile(x_flat, game.dims());
      cand.lambda = lambda;
      fill_residuals(game, cand);
      if (cand.max_residual() <= kAccept) {
        if (!found || cand.max_residual() < best.max_residual()) best = cand;
        found = true;
      }
    }
  }
  if (!found)
    throw Error("solve_lq_kkt: no verified solution among enumerated active sets "
                "(is the game monotone LQ on boxes?)");
  return best;
}

namespace {

Vector project_extended(const Game& game, const Vector& z, double cap) {
  const int n = game.total_dim();
  const int m = game.constraint().num_rows();
  Vector out(n + m);
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.constraint().block_offset(i);
    const int d = game.constraint().block_dim(i);
    out.segment(off, d) = project(game.player(i).action_set, z.segment(off, d));
  }
  out.tail(m) = z.tail(m).cwiseMax(0.0).cwiseMin(cap);
  return out;
}

}  // namespace

KktSolution solve_extragradient(const Game& game, double lambda_cap, long iterations) {
  if (!(lambda_cap > 0.0)) throw Error("solve_extragradient: cap must be positive");
  if (iterations < 1) throw Error("solve_extragradient: iterations must be >= 1");
  const int n = game.total_dim();
  const int m = game.constraint().num_rows();
  constexpr double kAccept = 1e-6;

  const auto op = [&](const Vector& z) {
    const Profile x = split_profile(z.head(n), game.dims());
    const Profile v = game.gradients(x);
    Vector out(n + m);
    for (int i = 0; i < game.num_players(); ++i) {
      const auto& con = game.constraint();
      out.segment(con.block_offset(i), con.block_dim(i)) =
          v[static_cast<size_t>(i)] - con.block(i).transpose() * z.tail(m);
    }
    out.tail(m) = game.constraint().slack_violation(z.head(n));
    return out;
  };

  // Lipschitz estimate by sampling, inflated by the 1.25 safety factor
  auto rng = make_rng(20240915);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double lip = 1e-12;
  for (int t = 0; t < 64; ++t) {
    Vector z1(n + m), z2(n + m);
    z1.head(n) = concat_profile(game.sample_profile(rng));
    z2.head(n) = concat_profile(game.sample_profile(rng));
    for (int r = 0; r < m; ++r) z1(n + r) = lambda_cap * unif(rng);
    for (int r = 0; r < m; ++r) z2(n + r) = lambda_cap * unif(rng);
    const double dz = (z1 - z2).norm();
    if (dz < 1e-12) continue;
    lip = std::max(lip, (op(z1) - op(z2)).norm() / dz);
  }
  const double step = 1.0 / (1.25 * lip);

  Vector z(n + m);
  z.head(n) = concat_profile(game.interior_profile());
  z.tail(m).setZero();

  KktSolution cand;
  for (long it = 0; it < iterations; ++it) {
    const Vector z_half = project_extended(game, z + step * op(z), lambda_cap);
    z = project_extended(game, z + step * op(z_half), lambda_cap);

    if (it % 100 == 99 || it == iterations - 1) {
      cand.x = split_profile(z.head(n), game.dims());
      cand.lambda = z.tail(m);
      fill_residuals(game, cand);
      if (cand.max_residual() <= kAccept) {
        if (m > 0 && cand.lambda.maxCoeff() >= lambda_cap * (1.0 - 1e-6))
          throw CapHitError("solve_extragradient: price iterate reached the cap " +
                            std::to_string(lambda_cap), lambda_cap);
        return cand;
      }
    }
  }
  if (m > 0 && z.tail(m).maxCoeff() >= lambda_cap * (1.0 - 1e-6))
    throw CapHitError("solve_extragradient: price iterate pinned at the cap " +
                      std::to_string(lambda_cap), lambda_cap);
  throw Error("solve_extragradient: residual target 1e-6 not met after " +
              std::to_string(iterations) + " iterations (best " +
              std::to_string(cand.max_residual()) + ")");
}

KktSolution solve_extragradient_auto(const Game& game, long iterations,
                                     int max_doublings) {
  double cap = 4.0;
  for (int attempt = 0;; ++attempt) {
    try {
      return solve_extragradient(game, cap, iterations);
    } catch (const CapHitError&) {
      if (attempt >= max_doublings) throw;
      cap *= 2.0;
    }
  }
}

}  // namespace maal
