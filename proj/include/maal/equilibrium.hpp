#ifndef MAAL_EQUILIBRIUM_HPP
#define MAAL_EQUILIBRIUM_HPP

#include "maal/game.hpp"

namespace maal {

/// Primal-dual operator (x, lambda) -> [ v(x) - A^T lambda, A x - b ] that
/// decouples the shared constraint into a product-structured problem over
/// X x R^M_{>=0}.
class ExtendedOperator {
 public:
  explicit ExtendedOperator(const Game& game) : game_(&game) {}

  Vector primal(const Profile& x, const Vector& lambda) const;
  Vector dual(const Profile& x) const;  // A x - b
  /// Stacked evaluation on a flat z = (x_flat, lambda).
  Vector full(const Vector& z) const;
  int total_dim() const {
    return game_->total_dim() + game_->constraint().num_rows();
  }
  const Game& game() const { return *game_; }

 private:
  const Game* game_;
};

inline ExtendedOperator extended_operator(const Game& game) {
  return ExtendedOperator(game);
}

/// max_{z in Z} <z - z_bar, F(z_bar)>; <= 0 (up to tolerance) certifies an
/// approximate VI solution.
struct ViResidual {
  double value = 0.0;
  Vector attaining_point;
  double lambda_cap = std::numeric_limits<double>::quiet_NaN();
};

/// Residual of VI(Q, v) at a (near-)feasible profile, solved as one LP over
/// Q = { x in X : Ax <= b }. Requires polyhedral action sets; the point may
/// violate the coupling rows by at most feas_tol (iterates are feasible only
/// in the limit).
ViResidual vi_residual_feasible(const Game& game, const Profile& x,
                                double feas_tol = 1e-3);

/// Residual of VI(X x [0, cap]^M, v~) at (x, lambda); separable over blocks,
/// so every factor is handled by its support function (LP only for polytopes).
ViResidual vi_residual_extended(const Game& game, const Profile& x,
                                const Vector& lambda, double lambda_cap);

struct NashReport {
  bool certified = false;
  double tolerance = 0.0;
  std::vector<double> improvements;  // best unilateral gain per player
  Profile best_responses;
};

/// Grid search of each player's feasible deviations Q_i(x_-i) at resolution h
/// (per-player dimension capped at 3). Needs utility oracles.
NashReport check_nash(const Game& game, const Profile& x, double grid_h,
                      double tolerance = -1.0, ExecMode mode = ExecMode::Serial);

struct DiscretizedSet {
  std::vector<Vector> points;
  double h = 0.0;
};

DiscretizedSet discretize_set(const ActionSet& set, double h);
/// Joint grid over Q (points of the X-grid satisfying Ax <= b); total
/// dimension capped at 3.
DiscretizedSet discretize_feasible(const Game& game, double h);

struct VsSolReport {
  std::vector<long> sol_members;
  std::vector<long> vs_members;
  long symmetric_difference = 0;
  double hausdorff = 0.0;  // between the two discrete sets; inf if one is empty
  bool equal = false;      // nonempty sets within grid scale of each other
  bool vs_empty = true;
  double sol_tol = 0.0;
  double vs_tol = 0.0;
};

/// Discrete solution set { z : max_w <w - z, F(z)> <= sol_tol } versus the
/// discrete variationally-stable set { z : max_w <w - z, F(w)> <= vs_tol }.
/// The solution residual grows linearly with the distance from the exact set
/// while the stability residual grows quadratically (with the monotonicity
/// modulus as curvature), so sol_tol scales with h and vs_tol with h^2 times
/// an estimated modulus; `equal` then compares the sets at grid scale via
/// their Hausdorff distance.
VsSolReport check_vs_equals_sol(const std::function<Vector(const Vector&)>& op,
                                const DiscretizedSet& z, double tol_scale = 1.0,
                                ExecMode mode = ExecMode::Serial);

/// Monotonicity spot check: <x1 - x2, v(x1) - v(x2)> <= 0 on sampled pairs.
DiagnosticReport check_monotone(const Game& game, long samples, std::uint64_t seed);

}  // namespace maal

#endif  // MAAL_EQUILIBRIUM_HPP
