#ifndef MAAL_DIAGNOSTICS_HPP
#define MAAL_DIAGNOSTICS_HPP

#include "maal/engine.hpp"
#include "maal/equilibrium.hpp"

namespace maal {

/// Per-step series derived from a ledger for a fixed reference (x*, lambda*):
///   xi_t      = <(X_t,lambda_t) - (x*,lambda*), v~(X_t,lambda_t)>
///   psi_t     = ||lambda_t||^2 [gamma_t(2 theta_t^2 + C~2) - theta_t/2]
///               + theta_t ||lambda*||^2 / 2
/// plus exact running partial sums of gamma, gamma^2 and gamma*theta.
struct LedgerSeries {
  std::vector<double> xi;
  std::vector<double> psi;
  std::vector<double> sum_gamma;
  std::vector<double> sum_gamma_sq;
  std::vector<double> sum_gamma_theta;
};

LedgerSeries ledger_series(const Game& game, const BoundLedger& ledger,
                           const GameConstants& constants, const Profile& x_ref,
                           const Vector& lambda_ref);

/// Outcome of replaying the summed primal-dual drift bound
///   E_T(x,lambda) <= sum_t gamma_t xi_t + C~1 sum gamma_t^2
///                    + sum gamma_t theta_t ||lambda||^2/2
///                    + sum gamma_t ||lambda_t||^2 [gamma_t(2theta_t^2+C~2) - theta_t/2]
/// at every recorded horizon, with relative slack tolerance 1e-6*(1+|rhs|).
struct Theorem2Report {
  bool holds = false;
  double max_rel_violation = 0.0;
  long worst_horizon = -1;
  std::vector<long> horizons;
  std::vector<double> lhs;
  std::vector<double> rhs;
};

Theorem2Report check_theorem2(const Game& game, const std::vector<Regularizer>& regs,
                              const BoundLedger& ledger, const GameConstants& constants,
                              const Profile& x_ref, const Vector& lambda_ref);

/// Recording wrapper: the step-size conditions are certified by
/// validate_schedule; this just runs it so reports can embed the certificate.
ScheduleCertificate check_theorem3_preconditions(const Schedule& schedule,
                                                 const GameConstants& constants,
                                                 long horizon);

struct RunReport {
  std::string scenario;
  std::vector<long> t;                 // recorded iterations
  std::vector<double> violation;       // ||(A X_t - b)_+||_2
  std::vector<double> kkt;             // natural-map residual at recorded t
  std::vector<double> lambda_norm;
  std::vector<double> distance;        // ||X_t - x*||_2, empty without reference
  std::vector<double> fenchel;         // F^N(x*, Y_t), empty without reference

  bool converged = false;
  double tol_violation = 1e-3;
  double tol_residual = 1e-3;
  double final_violation = 0.0;
  double final_vi_residual = 0.0;
  std::string residual_method;         // "lp_over_Q" or "natural_map"
  double final_distance = -1.0;        // -1 without reference
  double final_lambda_gap = -1.0;

  bool lambda_unbounded = false;
  double sup_lambda_norm = 0.0;
  std::vector<std::string> notes;

  std::optional<Theorem2Report> theorem2;
  std::optional<ScheduleCertificate> certificate;

  long iterations = 0;
  bool early_stopped = false;
  double wall_seconds = 0.0;
};

/// All trajectory-level metrics plus the convergence verdict
/// (violation_T < tol_v and vi residual at X_T < tol_r).
RunReport convergence_metrics(const Game& game, const std::vector<Regularizer>& regs,
                              const RunResult& result,
                              const std::optional<ReferencePoint>& reference,
                              double tol_violation = 1e-3, double tol_residual = 1e-3);

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory,
                          const RunReport& report);
/// Reads t, X, lambda columns back (dual states are not part of the CSV).
Trajectory read_trajectory_csv(const std::string& path);

std::string report_to_json(const RunReport& report,
                           const std::optional<GameConstants>& constants,
                           const Trajectory* trajectory = nullptr);

}  // namespace maal

#endif  // MAAL_DIAGNOSTICS_HPP
