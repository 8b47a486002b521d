#include "maal/game.hpp"

#include <cmath>

#include "maal/geometry.hpp"
#include "maal/lp.hpp"

namespace maal {
namespace {

double spectral_norm_power(const Eigen::Ref<const Matrix>& a) {
  if (a.size() == 0) return 0.0;
  const Matrix b = a.transpose() * a;
  if (b.isZero(0.0)) return 0.0;
  const int d = static_cast<int>(b.rows());
  Vector v(d);
  for (int j = 0; j < d; ++j) v(j) = 1.0 + 1e-3 * j;  // deterministic, non-degenerate
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const Vector w = b * v;
    const double sq = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(sq - prev) <= 1e-10 * std::max(sq, 1e-300)) {
      prev = sq;
      break;
    }
    prev = sq;
  }
  return std::sqrt(std::max(prev, 0.0));
}

// Exact induced (l2 -> linf) norm of A_i^T: max column l2-norm of A_i.
double two_to_inf_norm(const Eigen::Ref<const Matrix>& a) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) best = std::max(best, a.col(j).norm());
  return best;
}

double set_diameter_hint(const ActionSet& s) {
  return (s.bbox_upper() - s.bbox_lower()).norm() + 1e-9;
}

// min slack of the coupling rows and (optionally) of the set-interior margins,
// with a supergradient in the flat profile variable.
struct MarginEval {
  double value;
  Vector supergrad;
};

MarginEval eval_margin(const Game& game, const Vector& x, bool interior) {
  const auto& con = game.constraint();
  const int n = con.total_dim();
  double best = std::numeric_limits<double>::infinity();
  Vector grad = Vector::Zero(n);

  const Vector slack = con.rhs() - con.matrix() * x;
  for (int m = 0; m < con.num_rows(); ++m) {
    if (slack(m) < best) {
      best = slack(m);
      grad = -con.matrix().row(m).transpose();
    }
  }
  if (interior) {
    for (int i = 0; i < game.num_players(); ++i) {
      const ActionSet& set = game.player(i).action_set;
      const int off = con.block_offset(i);
      const int d = set.dim();
      const Vector xi = x.segment(off, d);
      switch (set.kind()) {
        case SetKind::Box:
          for (int j = 0; j < d; ++j) {
            if (xi(j) - set.lower()(j) < best) {
              best = xi(j) - set.lower()(j);
              grad.setZero();
              grad(off + j) = 1.0;
            }
            if (set.upper()(j) - xi(j) < best) {
              best = set.upper()(j) - xi(j);
              grad.setZero();
              grad(off + j) = -1.0;
            }
          }
          break;
        case SetKind::Simplex:
          for (int j = 0; j < d; ++j) {
            if (xi(j) < best) {
              best = xi(j);
              grad.setZero();
              grad(off + j) = 1.0;
            }
          }
          break;
        case SetKind::EuclideanBall: {
          const Vector diff = xi - set.center();
          const double margin = set.radius() - diff.norm();
          if (margin < best) {
            best = margin;
            grad.setZero();
            if (diff.norm() > 0.0)
              grad.segment(off, d) = -diff / diff.norm();
          }
          break;
        }
        case SetKind::HalfspacePolytope: {
          const Vector ps = set.offsets() - set.rows() * xi;
          for (int r = 0; r < ps.size(); ++r) {
            const double rn = set.rows().row(r).norm();
            const double margin = ps(r) / std::max(rn, 1e-300);
            if (margin < best) {
              best = margin;
              grad.setZero();
              grad.segment(off, d) = -set.rows().row(r).transpose() / std::max(rn, 1e-300);
            }
          }
          break;
        }
      }
    }
  }
  return {best, grad};
}

Vector project_profile_flat(const Game& game, const Vector& x) {
  Vector out(x.size());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.constraint().block_offset(i);
    const int d = game.constraint().block_dim(i);
    out.segment(off, d) = project(game.player(i).action_set, x.segment(off, d));
  }
  return out;
}

// Projected supergradient ascent on the concave margin function; covers the
// set kinds the LP cannot (Euclidean balls).
std::pair<Vector, double> maximize_margin_subgrad(const Game& game, bool interior) {
  Vector x(game.total_dim());
  for (int i = 0; i < game.num_players(); ++i) {
    const int off = game.constraint().block_offset(i);
    x.segment(off, game.constraint().block_dim(i)) =
        game.player(i).action_set.interior_point();
  }
  double scale = 0.0;
  for (int i = 0; i < game.num_players(); ++i)
    scale = std::max(scale, set_diameter_hint(game.player(i).action_set));
  Vector best_x = x;
  double best_v = eval_margin(game, x, interior).value;
  for (int k = 0; k < 4000; ++k) {
    const MarginEval ev = eval_margin(game, x, interior);
    if (ev.value > best_v) {
      best_v = ev.value;
      best_x = x;
    }
    const double gn = ev.supergrad.norm();
    if (gn == 0.0) break;
    const double step = scale / (gn * std::sqrt(static_cast<double>(k + 1)));
    x = project_profile_flat(game, x + step * ev.supergrad);
  }
  return {best_x, best_v};
}

// LP:  max s  over x in (shrunk) X, A x + s <= b. `interior` additionally
// keeps x a margin s inside each polyhedral factor.
LpSolution margin_lp(const Game& game, bool interior) {
  const auto& con = game.constraint();
  const int n = con.total_dim();
  LpProblem lp = LpProblem::with_vars(n + 1);
  lp.c = Vector::Zero(n + 1);
  lp.c(n) = -1.0;  // maximize s

  std::vector<Eigen::RowVectorXd> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;

  for (int m = 0; m < con.num_rows(); ++m) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
    row.head(n) = con.matrix().row(m);
    row(n) = 1.0;
    ub_rows.push_back(row);
    ub_rhs.push_back(con.rhs()(m));
  }

  double s_cap = 1.0 + con.rhs().lpNorm<Eigen::Infinity>();
  for (int i = 0; i < game.num_players(); ++i) {
    const ActionSet& set = game.player(i).action_set;
    const int off = con.block_offset(i);
    const int d = set.dim();
    s_cap = std::max(s_cap, set_diameter_hint(set));
    switch (set.kind()) {
      case SetKind::Box:
        lp.lb.segment(off, d) = set.lower();
        lp.ub.segment(off, d) = set.upper();
        if (interior) {
          for (int j = 0; j < d; ++j) {
            Eigen::RowVectorXd lo = Eigen::RowVectorXd::Zero(n + 1);
            lo(off + j) = -1.0;
            lo(n) = 1.0;
            ub_rows.push_back(lo);
            ub_rhs.push_back(-set.lower()(j));
            Eigen::RowVectorXd hi = Eigen::RowVectorXd::Zero(n + 1);
            hi(off + j) = 1.0;
            hi(n) = 1.0;
            ub_rows.push_back(hi);
            ub_rhs.push_back(set.upper()(j));
          }
        }
        break;
      case SetKind::Simplex: {
        lp.lb.segment(off, d).setZero();
        lp.ub.segment(off, d).setOnes();
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(n + 1);
        sum.segment(off, d).setOnes();
        eq_rows.push_back(sum);
        eq_rhs.push_back(1.0);
        if (interior) {
          for (int j = 0; j < d; ++j) {
            Eigen::RowVectorXd lo = Eigen::RowVectorXd::Zero(n + 1);
            lo(off + j) = -1.0;
            lo(n) = 1.0;
            ub_rows.push_back(lo);
            ub_rhs.push_back(0.0);
          }
        }
        break;
      }
      case SetKind::HalfspacePolytope: {
        lp.lb.segment(off, d) = set.bbox_lower();
        lp.ub.segment(off, d) = set.bbox_upper();
        for (int r = 0; r < set.rows().rows(); ++r) {
          Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
          row.segment(off, d) = set.rows().row(r);
          if (interior) row(n) = set.rows().row(r).norm();
          ub_rows.push_back(row);
          ub_rhs.push_back(set.offsets()(r));
        }
        break;
      }
      case SetKind::EuclideanBall:
        throw Error("margin_lp: ball factors need the subgradient path");
    }
  }
  lp.lb(n) = -s_cap;
  lp.ub(n) = s_cap;

  lp.A_ub = Matrix::Zero(static_cast<Eigen::Index>(ub_rows.size()), n + 1);
  lp.b_ub = Vector::Zero(static_cast<Eigen::Index>(ub_rows.size()));
  for (size_t r = 0; r < ub_rows.size(); ++r) {
    lp.A_ub.row(static_cast<Eigen::Index>(r)) = ub_rows[r];
    lp.b_ub(static_cast<Eigen::Index>(r)) = ub_rhs[r];
  }
  lp.A_eq = Matrix::Zero(static_cast<Eigen::Index>(eq_rows.size()), n + 1);
  lp.b_eq = Vector::Zero(static_cast<Eigen::Index>(eq_rows.size()));
  for (size_t r = 0; r < eq_rows.size(); ++r) {
    lp.A_eq.row(static_cast<Eigen::Index>(r)) = eq_rows[r];
    lp.b_eq(static_cast<Eigen::Index>(r)) = eq_rhs[r];
  }
  return solve_lp(lp);
}

}  // namespace

AffineConstraint::AffineConstraint(Matrix a, Vector b, std::vector<int> block_dims)
    : a_(std::move(a)), b_(std::move(b)), dims_(std::move(block_dims)) {
  int total = 0;
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d <= 0) throw Error("constraint: non-positive block dimension");
    offsets_.push_back(total);
    total += d;
  }
  if (total != a_.cols())
    throw Error("constraint: block dimensions do not sum to the matrix width");
  if (a_.rows() != b_.size()) throw Error("constraint: row count mismatch");
  if (b_.size() < 1) throw Error("constraint: at least one coupling row required");
  if (!a_.allFinite() || !b_.allFinite()) throw Error("constraint: non-finite data");
}

Vector AffineConstraint::apply(const Profile& x) const {
  return slack_violation(concat_profile(x));
}

Game::Game(std::vector<PlayerSpec> players, AffineConstraint constraint)
    : players_(std::move(players)), constraint_(std::move(constraint)) {
  if (players_.empty()) throw Error("game: needs at least one player");
  if (static_cast<int>(players_.size()) != constraint_.num_blocks())
    throw Error("game: player count does not match constraint blocks");
  dims_.reserve(players_.size());
  for (int i = 0; i < num_players(); ++i) {
    const PlayerSpec& p = players_[static_cast<size_t>(i)];
    if (p.action_set.dim() != constraint_.block_dim(i))
      throw Error("game: action set dimension does not match constraint block " +
                  std::to_string(i));
    if (!p.gradient) throw Error("game: player " + std::to_string(i) + " has no gradient");
    dims_.push_back(p.action_set.dim());
  }

  // spot check gradient output dimensions at an interior profile
  const Profile x0 = interior_profile();
  for (int i = 0; i < num_players(); ++i) {
    const Vector g = players_[static_cast<size_t>(i)].gradient(x0);
    if (g.size() != dims_[static_cast<size_t>(i)])
      throw Error("game: gradient of player " + std::to_string(i) +
                  " returned wrong dimension");
  }

  // Q must be non-empty
  double feas;
  if (all_polyhedral()) {
    const LpSolution sol = margin_lp(*this, /*interior=*/false);
    if (!sol.optimal()) throw Error("game: feasibility LP failed");
    feas = sol.x(total_dim());
  } else {
    feas = maximize_margin_subgrad(*this, /*interior=*/false).second;
  }
  if (feas < -1e-9)
    throw Error("game: feasible set Q is empty (max coupling slack " +
                std::to_string(feas) + ")");
}

Profile Game::gradients(const Profile& x) const {
  if (static_cast<int>(x.size()) != num_players())
    throw Error("gradients: profile size mismatch");
  Profile out;
  out.reserve(x.size());
  for (int i = 0; i < num_players(); ++i) {
    Vector g = players_[static_cast<size_t>(i)].gradient(x);
    if (g.size() != dims_[static_cast<size_t>(i)])
      throw Error("gradients: player " + std::to_string(i) + " returned wrong dimension");
    if (!g.allFinite())
      throw Error("gradients: player " + std::to_string(i) + " returned non-finite value");
    out.push_back(std::move(g));
  }
  return out;
}

bool Game::all_polyhedral() const {
  for (const auto& p : players_)
    if (p.action_set.kind() == SetKind::EuclideanBall) return false;
  return true;
}

bool Game::has_utilities() const {
  for (const auto& p : players_)
    if (!p.utility) return false;
  return true;
}

Profile Game::sample_profile(std::mt19937_64& rng) const {
  Profile x;
  x.reserve(players_.size());
  for (const auto& p : players_) x.push_back(p.action_set.sample(rng));
  return x;
}

Profile Game::interior_profile() const {
  Profile x;
  x.reserve(players_.size());
  for (const auto& p : players_) x.push_back(p.action_set.interior_point());
  return x;
}

void GameConstants::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0) || !(k > 0.0))
    throw Error("constants: C1, C2, C3, K must all be strictly positive");
}

GameConstants estimate_constants(const Game& game, long samples, std::uint64_t seed,
                                 double modulus, std::optional<double> c1_override) {
  if (samples < 1) throw Error("estimate_constants: samples must be >= 1");
  if (!(modulus > 0.0)) throw Error("estimate_constants: modulus must be positive");
  const auto& con = game.constraint();

  // C2: exact induced norms per block, max across blocks
  double c2 = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto block = con.block(i);
    const double v = game.player(i).action_set.dual_norm_kind() == NormKind::Linf
                         ? two_to_inf_norm(block)
                         : spectral_norm_power(block);
    c2 = std::max(c2, v);
  }
  if (c2 <= 0.0)
    throw Error("constraint matrix is zero -- run unconstrained mirror ascent instead");

  // C3: exact when the whole product enumerates, sampled * 1.25 otherwise.
  // ||Ax - b|| is folded in so the constant also covers the shifted operator.
  double c3 = 0.0;
  bool enumerable = true;
  long combos = 1;
  for (int i = 0; i < game.num_players(); ++i) {
    const ActionSet& s = game.player(i).action_set;
    if (!s.vertex_enumerable()) {
      enumerable = false;
      break;
    }
    combos *= s.vertex_count();
    if (combos > (1L << 20)) {
      enumerable = false;
      break;
    }
  }
  auto c3_value = [&](const Vector& flat) {
    const Vector ax = con.matrix() * flat;
    return std::max(ax.norm(), (ax - con.rhs()).norm());
  };
  bool c3_exact = false;
  if (enumerable) {
    std::vector<long> idx(static_cast<size_t>(game.num_players()), 0);
    Vector flat(game.total_dim());
    for (long c = 0; c < combos; ++c) {
      long rem = c;
      for (int i = 0; i < game.num_players(); ++i) {
        const ActionSet& s = game.player(i).action_set;
        const long cnt = s.vertex_count();
        idx[static_cast<size_t>(i)] = rem % cnt;
        rem /= cnt;
        flat.segment(con.block_offset(i), s.dim()) = s.vertex(idx[static_cast<size_t>(i)]);
      }
      c3 = std::max(c3, c3_value(flat));
    }
    c3_exact = true;
  }

  // sampled maxima for C1 (and C3 when not exact)
  auto rng = make_rng(seed);
  double c1_samp = 0.0;
  double c3_samp = 0.0;
  for (long t = 0; t < samples; ++t) {
    const Profile x = game.sample_profile(rng);
    const Profile v = game.gradients(x);
    double dn = 0.0;
    for (int i = 0; i < game.num_players(); ++i)
      dn = std::max(dn, game.player(i).action_set.dual_norm(v[static_cast<size_t>(i)]));
    c1_samp = std::max(c1_samp, dn);
    if (!c3_exact) c3_samp = std::max(c3_samp, c3_value(concat_profile(x)));
  }
  if (!c3_exact) c3 = 1.25 * c3_samp;

  GameConstants gc;
  gc.c1 = c1_override ? *c1_override : 1.25 * c1_samp;
  gc.c1 = std::max(gc.c1, 1e-12);
  gc.c2 = c2;
  gc.c3 = std::max(c3, 1e-12);
  gc.k = modulus;
  gc.validate();
  return gc;
}

SlaterCertificate check_slater(const Game& game) {
  SlaterCertificate cert;
  Vector point;
  double margin_joint;
  if (game.all_polyhedral()) {
    const LpSolution sol = margin_lp(game, /*interior=*/true);
    if (!sol.optimal()) {
      cert.holds = false;
      cert.note = "margin LP failed (set may be empty)";
      return cert;
    }
    point = sol.x.head(game.total_dim());
    margin_joint = sol.x(game.total_dim());
  } else {
    auto [x, v] = maximize_margin_subgrad(game, /*interior=*/true);
    point = x;
    margin_joint = v;
  }

  const Vector slack = game.constraint().rhs() - game.constraint().matrix() * point;
  if (margin_joint > 1e-9 && slack.minCoeff() > 0.0) {
    cert.holds = true;
    cert.point = point;
    cert.margin = slack.minCoeff();
  } else {
    cert.holds = false;
    cert.point = point;
    cert.margin = slack.size() ? slack.minCoeff() : 0.0;
    cert.note = "no strictly feasible relative-interior point (best joint margin " +
                std::to_string(margin_joint) + ")";
  }
  return cert;
}

LpProblem feasible_region_lp(const Game& game) {
  if (!game.all_polyhedral())
    throw Error("feasible_region_lp: requires polyhedral action sets");
  const auto& con = game.constraint();
  const int n = con.total_dim();
  LpProblem lp = LpProblem::with_vars(n);

  std::vector<Eigen::RowVectorXd> ub_rows;
  std::vector<double> ub_rhs;
  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;

  for (int m = 0; m < con.num_rows(); ++m) {
    ub_rows.emplace_back(con.matrix().row(m));
    ub_rhs.push_back(con.rhs()(m));
  }
  for (int i = 0; i < game.num_players(); ++i) {
    const ActionSet& set = game.player(i).action_set;
    const int off = con.block_offset(i);
    const int d = set.dim();
    switch (set.kind()) {
      case SetKind::Box:
        lp.lb.segment(off, d) = set.lower();
        lp.ub.segment(off, d) = set.upper();
        break;
      case SetKind::Simplex: {
        lp.lb.segment(off, d).setZero();
        lp.ub.segment(off, d).setOnes();
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(n);
        sum.segment(off, d).setOnes();
        eq_rows.push_back(sum);
        eq_rhs.push_back(1.0);
        break;
      }
      case SetKind::HalfspacePolytope: {
        lp.lb.segment(off, d) = set.bbox_lower();
        lp.ub.segment(off, d) = set.bbox_upper();
        for (int r = 0; r < set.rows().rows(); ++r) {
          Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
          row.segment(off, d) = set.rows().row(r);
          ub_rows.push_back(row);
          ub_rhs.push_back(set.offsets()(r));
        }
        break;
      }
      case SetKind::EuclideanBall:
        throw Error("feasible_region_lp: requires polyhedral action sets");
    }
  }

  lp.A_ub = Matrix::Zero(static_cast<Eigen::Index>(ub_rows.size()), n);
  lp.b_ub = Vector::Zero(static_cast<Eigen::Index>(ub_rows.size()));
  for (size_t r = 0; r < ub_rows.size(); ++r) {
    lp.A_ub.row(static_cast<Eigen::Index>(r)) = ub_rows[r];
    lp.b_ub(static_cast<Eigen::Index>(r)) = ub_rhs[r];
  }
  lp.A_eq = Matrix::Zero(static_cast<Eigen::Index>(eq_rows.size()), n);
  lp.b_eq = Vector::Zero(static_cast<Eigen::Index>(eq_rows.size()));
  for (size_t r = 0; r < eq_rows.size(); ++r) {
    lp.A_eq.row(static_cast<Eigen::Index>(r)) = eq_rows[r];
    lp.b_eq(static_cast<Eigen::Index>(r)) = eq_rhs[r];
  }
  return lp;
}

DiagnosticReport check_concavity(const Game& game, int player, long profile_samples,
                                 std::uint64_t seed) {
  if (player < 0 || player >= game.num_players())
    throw Error("check_concavity: bad player index");
  if (!game.player(player).gradient) throw Error("check_concavity: no gradient oracle");
  constexpr double kTol = 1e-9;
  auto rng = make_rng(seed);
  DiagnosticReport rep;
  for (long t = 0; t < profile_samples; ++t) {
    Profile base = game.sample_profile(rng);
    Profile x1 = base, x2 = base;
    x1[static_cast<size_t>(player)] = game.player(player).action_set.sample(rng);
    x2[static_cast<size_t>(player)] = game.player(player).action_set.sample(rng);
    const Vector g1 = game.player(player).gradient(x1);
    const Vector g2 = game.player(player).gradient(x2);
    const double inner =
        (x1[static_cast<size_t>(player)] - x2[static_cast<size_t>(player)]).dot(g1 - g2);
    rep.record(inner, kTol);
  }
  if (!rep.passed)
    rep.notes.push_back("gradient monotonicity violated; utility may not be concave "
                        "in the player's own action");
  return rep;
}

}  // namespace maal
