#ifndef MAAL_ENGINE_HPP
#define MAAL_ENGINE_HPP

#include <optional>

#include "maal/game.hpp"
#include "maal/ledger.hpp"
#include "maal/mirror.hpp"
#include "maal/schedule.hpp"

namespace maal {

/// Everything a player's update is allowed to see: its own gradient value at
/// the current profile, its own constraint block, and the broadcast price.
struct PlayerView {
  int player_id;
  const Vector& gradient_value;      // v_i(X_t)
  Eigen::Ref<const Matrix> a_block;  // A_(:,i)
  const Vector& price;               // lambda_t
};

/// Dual ascent step Y_i + gamma_t * (v_i(X_t) - A_(:,i)^T lambda_t).
/// Pure function of the view; throws on a non-finite gradient value.
Vector player_step(const PlayerView& view, const Vector& y_i, double gamma_t);

/// Price update Pi_{>=0}( lambda + gamma_t * ((A X_t - b) - theta_t lambda) ).
Vector coordinator_step(const Vector& lambda, const Profile& x,
                        const AffineConstraint& constraint, double gamma_t,
                        double theta_t);

struct MaalState {
  long t = 0;
  Profile y;       // per-player dual iterates
  Profile x;       // cached mirror images, recomputed each iteration
  Vector lambda;   // nonnegative price vector
};

struct StepSnapshot {
  long t;
  const Profile& x;
  const Vector& lambda;
  double gamma;
  double theta;
};

/// Called every `stride` iterations; must not mutate any engine state.
using Observer = std::function<void(const StepSnapshot&)>;

struct RunConfig {
  long horizon = 0;
  long stride = 1000;
  bool record_ledger = true;
  ExecMode mode = ExecMode::Serial;

  /// A valid certificate must be supplied unless validation is waived.
  std::optional<ScheduleCertificate> certificate;
  bool allow_unvalidated_schedule = false;

  /// Early stop once max(kkt residual, constraint violation) stays below the
  /// tolerance for `early_stop_window` consecutive recorded strides; 0 = off.
  double early_stop_tol = 0.0;
  int early_stop_window = 100;

  Observer observer;
};

struct RunResult {
  Trajectory trajectory;
  BoundLedger ledger;      // empty when record_ledger was off
  MaalState final_state;
  long iterations = 0;     // executed steps (== horizon unless early-stopped)
  bool early_stopped = false;
  double wall_seconds = 0.0;
};

/// Runs the mirror-ascent / augmented-Lagrangian loop for `horizon` rounds.
/// All player updates within one round read the same (X_t, lambda_t) snapshot
/// (simultaneous-move semantics); the coordinator then updates and broadcasts
/// the price. Deterministic given identical inputs in both exec modes.
RunResult run(const Game& game, const std::vector<Regularizer>& regs,
              const Schedule& schedule, const Profile& y0, const Vector& lambda0,
              const RunConfig& config);

/// Default initial state: Y_0 = 0 per player, lambda_0 = 0.
Profile zero_duals(const Game& game);

/// Natural-map residual of the primal-dual system at (x, lambda):
/// max of the mirror-side fixed-point gap and the price-side gap.
double kkt_residual(const Game& game, const Profile& x, const Vector& lambda);

}  // namespace maal

#endif  // MAAL_ENGINE_HPP
