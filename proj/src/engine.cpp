#include "maal/engine.hpp"

#include <chrono>
#include <cmath>

#include "maal/geometry.hpp"

namespace maal {

Vector player_step(const PlayerView& view, const Vector& y_i, double gamma_t) {
  if (!(gamma_t > 0.0)) throw Error("player_step: gamma must be positive");
  if (!view.gradient_value.allFinite())
    throw Error("player_step: non-finite gradient for player " +
                std::to_string(view.player_id));
  if (view.gradient_value.size() != y_i.size() ||
      view.a_block.cols() != y_i.size() || view.a_block.rows() != view.price.size())
    throw Error("player_step: dimension mismatch for player " +
                std::to_string(view.player_id));
  return y_i + gamma_t * (view.gradient_value - view.a_block.transpose() * view.price);
}

Vector coordinator_step(const Vector& lambda, const Profile& x,
                        const AffineConstraint& constraint, double gamma_t,
                        double theta_t) {
  if (!(gamma_t > 0.0)) throw Error("coordinator_step: gamma must be positive");
  if (theta_t < 0.0) throw Error("coordinator_step: theta must be nonnegative");
  if (lambda.minCoeff() < 0.0) throw Error("coordinator_step: lambda must be nonnegative");
  const Vector drift = constraint.apply(x) - theta_t * lambda;
  return project_nonneg(lambda + gamma_t * drift);
}

Profile zero_duals(const Game& game) {
  Profile y;
  y.reserve(static_cast<size_t>(game.num_players()));
  for (int i = 0; i < game.num_players(); ++i)
    y.push_back(Vector::Zero(game.dims()[static_cast<size_t>(i)]));
  return y;
}

double kkt_residual(const Game& game, const Profile& x, const Vector& lambda) {
  const Profile v = game.gradients(x);
  double primal_gap = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    const auto& set = game.player(i).action_set;
    const Vector adj =
        v[static_cast<size_t>(i)] - game.constraint().block(i).transpose() * lambda;
    const Vector fixed = project(set, x[static_cast<size_t>(i)] + adj);
    primal_gap += (fixed - x[static_cast<size_t>(i)]).squaredNorm();
  }
  const Vector slack = game.constraint().apply(x);
  const double dual_gap = (project_nonneg(lambda + slack) - lambda).norm();
  return std::max(std::sqrt(primal_gap), dual_gap);
}

namespace {

void check_state_finite(const Profile& x, const Vector& lambda, long t) {
  for (size_t i = 0; i < x.size(); ++i)
    if (!x[i].allFinite())
      throw Error("run: non-finite action for player " + std::to_string(i) +
                  " at iteration " + std::to_string(t));
  if (!lambda.allFinite())
    throw Error("run: non-finite price vector at iteration " + std::to_string(t));
}

}  // namespace

RunResult run(const Game& game, const std::vector<Regularizer>& regs,
              const Schedule& schedule, const Profile& y0, const Vector& lambda0,
              const RunConfig& config) {
  const int n = game.num_players();
  if (static_cast<int>(regs.size()) != n)
    throw Error("run: one regularizer per player required");
  for (int i = 0; i < n; ++i)
    if (regs[static_cast<size_t>(i)].domain().dim() != game.dims()[static_cast<size_t>(i)])
      throw Error("run: regularizer domain mismatch for player " + std::to_string(i));
  if (static_cast<int>(y0.size()) != n) throw Error("run: Y0 must have one block per player");
  for (int i = 0; i < n; ++i)
    if (y0[static_cast<size_t>(i)].size() != game.dims()[static_cast<size_t>(i)])
      throw Error("run: Y0 block dimension mismatch for player " + std::to_string(i));
  if (lambda0.size() != game.constraint().num_rows())
    throw Error("run: lambda0 dimension mismatch");
  if (lambda0.size() > 0 && lambda0.minCoeff() < 0.0)
    throw Error("run: lambda0 must be componentwise nonnegative");
  if (config.horizon < 1) throw Error("run: horizon must be >= 1");
  if (config.stride < 1) throw Error("run: stride must be >= 1");
  if (!config.allow_unvalidated_schedule) {
    if (!config.certificate || !config.certificate->valid)
      throw Error("run: schedule not certified (pass a valid certificate or waive "
                  "validation explicitly)");
  }

  const auto t_start = std::chrono::steady_clock::now();

  RunResult result;
  result.trajectory.dims = game.dims();
  result.trajectory.constraint_rows = game.constraint().num_rows();
  if (config.record_ledger) {
    result.ledger = BoundLedger(game.dims(), game.constraint().num_rows());
    result.ledger.reserve(config.horizon);
  }

  MaalState state;
  state.y = y0;
  state.lambda = lambda0;
  state.x.assign(static_cast<size_t>(n), Vector());

  Profile grads(static_cast<size_t>(n));
  Profile y_next(static_cast<size_t>(n));
  int consecutive_small = 0;
  const bool parallel = config.mode == ExecMode::Parallel;

  auto record = [&](long t, double g, double th) {
    Trajectory::Point pt;
    pt.t = t;
    pt.x_flat = concat_profile(state.x);
    pt.lambda = state.lambda;
    pt.gamma = g;
    pt.theta = th;
    pt.y_flat = concat_profile(state.y);
    result.trajectory.points.push_back(std::move(pt));
    if (config.record_ledger) result.ledger.add_snapshot(t, state.y, state.lambda);
    if (config.observer) {
      const StepSnapshot snap{t, state.x, state.lambda, g, th};
      config.observer(snap);
    }
  };

  long t = 0;
  for (; t < config.horizon; ++t) {
    // play: X_t = Phi(Y_t), recomputed so the cache can never drift
#pragma omp parallel for schedule(static) if (parallel && n >= 8)
    for (int i = 0; i < n; ++i)
      state.x[static_cast<size_t>(i)] =
          regs[static_cast<size_t>(i)].mirror(state.y[static_cast<size_t>(i)]);
    state.t = t;
    check_state_finite(state.x, state.lambda, t);

    const double g = schedule.gamma(t);
    const double th = schedule.theta(t);

    const bool recorded = t % config.stride == 0;
    if (recorded) record(t, g, th);
    if (config.record_ledger)
      result.ledger.append_step(concat_profile(state.x), state.lambda, g, th);

    // observe and update in one sweep: each player's gradient is taken at the
    // same (X_t, lambda_t) snapshot and feeds only that player's view
#pragma omp parallel for schedule(static) if (parallel && n >= 8)
    for (int i = 0; i < n; ++i) {
      grads[static_cast<size_t>(i)] = game.player(i).gradient(state.x);
      const PlayerView view{i, grads[static_cast<size_t>(i)],
                            game.constraint().block(i), state.lambda};
      y_next[static_cast<size_t>(i)] =
          player_step(view, state.y[static_cast<size_t>(i)], g);
    }
    for (int i = 0; i < n; ++i) {
      if (!y_next[static_cast<size_t>(i)].allFinite())
        throw Error("run: non-finite dual state for player " + std::to_string(i) +
                    " at iteration " + std::to_string(t));
    }

    // coordinator update + broadcast after all player updates of round t
    state.lambda = coordinator_step(state.lambda, state.x, game.constraint(), g, th);
    state.y.swap(y_next);

    if (recorded && config.early_stop_tol > 0.0) {
      const double viol =
          project_nonneg(game.constraint().apply(state.x)).norm();
      const double res = kkt_residual(game, state.x, state.lambda);
      if (std::max(viol, res) < config.early_stop_tol)
        ++consecutive_small;
      else
        consecutive_small = 0;
      if (consecutive_small >= config.early_stop_window) {
        result.early_stopped = true;
        ++t;
        break;
      }
    }
  }

  // final state at the reached horizon
#pragma omp parallel for schedule(static) if (parallel && n >= 8)
  for (int i = 0; i < n; ++i)
    state.x[static_cast<size_t>(i)] =
        regs[static_cast<size_t>(i)].mirror(state.y[static_cast<size_t>(i)]);
  state.t = t;
  check_state_finite(state.x, state.lambda, t);
  record(t, schedule.gamma(t), schedule.theta(t));

  result.final_state = std::move(state);
  result.iterations = t;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace maal
