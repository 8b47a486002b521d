#include "maal/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "maal/geometry.hpp"

namespace maal {

LedgerSeries ledger_series(const Game& game, const BoundLedger& ledger,
                           const GameConstants& constants, const Profile& x_ref,
                           const Vector& lambda_ref) {
  if (ledger.empty()) throw Error("ledger_series: empty ledger");
  constants.validate();
  const long steps = ledger.steps();
  const Vector x_ref_flat = concat_profile(x_ref);
  const double ct2 = constants.ctilde2();
  const double lref_sq = lambda_ref.squaredNorm();

  LedgerSeries s;
  s.xi.resize(static_cast<size_t>(steps));
  s.psi.resize(static_cast<size_t>(steps));
  s.sum_gamma.resize(static_cast<size_t>(steps));
  s.sum_gamma_sq.resize(static_cast<size_t>(steps));
  s.sum_gamma_theta.resize(static_cast<size_t>(steps));

  double sg = 0.0, sg2 = 0.0, sgt = 0.0;
  for (long t = 0; t < steps; ++t) {
    const Vector x_flat = ledger.x_at(t);
    const Vector lambda = ledger.lambda_at(t);
    const double g = ledger.gamma(t);
    const double th = ledger.theta(t);

    const Profile x = split_profile(x_flat, ledger.dims());
    const Vector v = game.gradients_flat(x);
    const Vector primal = v - game.constraint().matrix().transpose() * lambda;
    const Vector dual = game.constraint().slack_violation(x_flat);
    const double xi = (x_flat - x_ref_flat).dot(primal) + (lambda - lambda_ref).dot(dual);

    const double lam_sq = lambda.squaredNorm();
    const double psi =
        lam_sq * (g * (2.0 * th * th + ct2) - 0.5 * th) + 0.5 * th * lref_sq;

    sg += g;
    sg2 += g * g;
    sgt += g * th;
    s.xi[static_cast<size_t>(t)] = xi;
    s.psi[static_cast<size_t>(t)] = psi;
    s.sum_gamma[static_cast<size_t>(t)] = sg;
    s.sum_gamma_sq[static_cast<size_t>(t)] = sg2;
    s.sum_gamma_theta[static_cast<size_t>(t)] = sgt;
  }
  return s;
}

Theorem2Report check_theorem2(const Game& game, const std::vector<Regularizer>& regs,
                              const BoundLedger& ledger, const GameConstants& constants,
                              const Profile& x_ref, const Vector& lambda_ref) {
  if (ledger.empty() || ledger.snapshots().empty())
    throw Error("check_theorem2: ledger incomplete");
  if (ledger.snapshots().front().t != 0)
    throw Error("check_theorem2: ledger must include the initial snapshot");
  constants.validate();

  const LedgerSeries series = ledger_series(game, ledger, constants, x_ref, lambda_ref);
  const double ct1 = constants.ctilde1();

  const auto& snap0 = ledger.snapshots().front();
  const double f0 = fenchel_primal_dual(regs, x_ref, snap0.y, lambda_ref, snap0.lambda);

  Theorem2Report rep;
  rep.holds = true;

  double rhs_acc = 0.0;  // sum of gamma_t (xi_t + psi_t)
  long next_step = 0;
  for (const auto& snap : ledger.snapshots()) {
    if (snap.t == 0) continue;
    if (snap.t > ledger.steps())
      throw Error("check_theorem2: snapshot beyond the recorded steps");
    for (; next_step < snap.t; ++next_step) {
      const double g = ledger.gamma(next_step);
      rhs_acc += g * (series.xi[static_cast<size_t>(next_step)] +
                      series.psi[static_cast<size_t>(next_step)]);
    }
    const double lhs =
        fenchel_primal_dual(regs, x_ref, snap.y, lambda_ref, snap.lambda) - f0;
    const double rhs =
        rhs_acc + ct1 * series.sum_gamma_sq[static_cast<size_t>(snap.t - 1)];

    rep.horizons.push_back(snap.t);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    const double rel = (lhs - rhs) / (1.0 + std::abs(rhs));
    if (rel > rep.max_rel_violation) {
      rep.max_rel_violation = rel;
      rep.worst_horizon = snap.t;
    }
    if (rel > 1e-6) rep.holds = false;
  }
  if (rep.horizons.empty()) throw Error("check_theorem2: no nonzero horizons recorded");
  return rep;
}

ScheduleCertificate check_theorem3_preconditions(const Schedule& schedule,
                                                 const GameConstants& constants,
                                                 long horizon) {
  return validate_schedule(schedule, constants, horizon);
}

RunReport convergence_metrics(const Game& game, const std::vector<Regularizer>& regs,
                              const RunResult& result,
                              const std::optional<ReferencePoint>& reference,
                              double tol_violation, double tol_residual) {
  const Trajectory& traj = result.trajectory;
  if (traj.points.empty()) throw Error("convergence_metrics: empty trajectory");

  RunReport rep;
  rep.tol_violation = tol_violation;
  rep.tol_residual = tol_residual;
  rep.iterations = result.iterations;
  rep.early_stopped = result.early_stopped;
  rep.wall_seconds = result.wall_seconds;

  Vector x_ref_flat;
  if (reference) x_ref_flat = concat_profile(reference->x);

  for (const auto& pt : traj.points) {
    rep.t.push_back(pt.t);
    rep.violation.push_back(project_nonneg(game.constraint().slack_violation(pt.x_flat)).norm());
    const Profile x = split_profile(pt.x_flat, traj.dims);
    rep.kkt.push_back(kkt_residual(game, x, pt.lambda));
    rep.lambda_norm.push_back(pt.lambda.norm());
    if (reference) {
      rep.distance.push_back((pt.x_flat - x_ref_flat).norm());
      if (pt.y_flat.size() == pt.x_flat.size())
        rep.fenchel.push_back(fenchel_total(regs, reference->x,
                                            split_profile(pt.y_flat, traj.dims)));
    }
  }

  const auto& last = traj.final_point();
  rep.final_violation = rep.violation.back();
  const Profile x_last = split_profile(last.x_flat, traj.dims);
  if (rep.final_violation > 1e-2) {
    rep.final_vi_residual = std::numeric_limits<double>::infinity();
    rep.residual_method = "skipped";
    rep.notes.push_back("final iterate too infeasible for a meaningful VI residual");
  } else if (game.all_polyhedral()) {
    rep.final_vi_residual = vi_residual_feasible(game, x_last, 1e-2).value;
    rep.residual_method = "lp_over_Q";
  } else {
    // ball factors: no joint LP; residual of the price-decoupled problem with
    // the default cap 10 * (1 + sup_t ||lambda_t||)
    double sup = 0.0;
    for (const auto& pt : traj.points) sup = std::max(sup, pt.lambda.norm());
    const double cap = 10.0 * (1.0 + sup);
    rep.final_vi_residual =
        vi_residual_extended(game, x_last, last.lambda, cap).value;
    rep.residual_method = "extended_support_cap_" + format_double(cap);
    rep.notes.push_back("ball action sets present: residual taken over "
                        "X x [0,cap]^M instead of the LP over Q");
  }
  rep.converged =
      rep.final_violation < tol_violation && rep.final_vi_residual < tol_residual;

  if (reference) {
    rep.final_distance = rep.distance.back();
    rep.final_lambda_gap = (last.lambda - reference->lambda).norm();
  }

  for (double ln : rep.lambda_norm) rep.sup_lambda_norm = std::max(rep.sup_lambda_norm, ln);
  // growth heuristic: price norm still climbing late in the run
  const size_t n = rep.lambda_norm.size();
  if (n >= 8) {
    double early = 0.0, late = 0.0;
    for (size_t i = 0; i < n / 2; ++i) early = std::max(early, rep.lambda_norm[i]);
    for (size_t i = n / 2; i < n; ++i) late = std::max(late, rep.lambda_norm[i]);
    if (late > 1.5 * std::max(early, 1e-12) && late > 10.0) {
      rep.lambda_unbounded = true;
      rep.notes.push_back("lambda unbounded -- check augmentation");
    }
  }
  return rep;
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory,
                          const RunReport& report) {
  if (trajectory.points.size() != report.t.size())
    throw Error("write_trajectory_csv: report does not match the trajectory");
  std::ofstream out(path);
  if (!out) throw Error("write_trajectory_csv: cannot open " + path);

  out << "t";
  int total = 0;
  for (size_t i = 0; i < trajectory.dims.size(); ++i)
    for (int j = 0; j < trajectory.dims[i]; ++j, ++total)
      out << ",x" << i << "_" << j;
  for (int m = 0; m < trajectory.constraint_rows; ++m) out << ",lambda" << m;
  out << ",violation,residual\n";

  for (size_t k = 0; k < trajectory.points.size(); ++k) {
    const auto& pt = trajectory.points[k];
    out << pt.t;
    for (int j = 0; j < pt.x_flat.size(); ++j) out << "," << format_double(pt.x_flat(j));
    for (int m = 0; m < pt.lambda.size(); ++m) out << "," << format_double(pt.lambda(m));
    out << "," << format_double(report.violation[k]) << ","
        << format_double(report.kkt[k]) << "\n";
  }
  if (!out) throw Error("write_trajectory_csv: write failed for " + path);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_trajectory_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error("read_trajectory_csv: empty file");

  // column layout: t, x{i}_{j}..., lambda{m}..., violation, residual
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 4 || cols.front() != "t")
    throw Error("read_trajectory_csv: unrecognized header");

  std::vector<int> dims;
  int m = 0;
  int last_player = -1;
  for (const auto& c : cols) {
    if (c.rfind("x", 0) == 0 && c.find('_') != std::string::npos) {
      const int player = std::stoi(c.substr(1, c.find('_') - 1));
      if (player != last_player) {
        dims.push_back(0);
        last_player = player;
      }
      ++dims.back();
    } else if (c.rfind("lambda", 0) == 0) {
      ++m;
    }
  }
  const int total = [&] {
    int s = 0;
    for (int d : dims) s += d;
    return s;
  }();

  Trajectory traj;
  traj.dims = dims;
  traj.constraint_rows = m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != 1 + total + m + 2)
      throw Error("read_trajectory_csv: bad row width");
    Trajectory::Point pt;
    pt.t = static_cast<long>(row[0]);
    pt.x_flat = Eigen::Map<const Vector>(row.data() + 1, total);
    pt.lambda = Eigen::Map<const Vector>(row.data() + 1 + total, m);
    traj.points.push_back(std::move(pt));
  }
  if (traj.points.empty()) throw Error("read_trajectory_csv: no data rows");
  return traj;
}

namespace {

nlohmann::json certificate_json(const ScheduleCertificate& cert) {
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : cert.conditions) {
    nlohmann::json jc{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    if (c.witness_t >= 0) jc["witness_t"] = c.witness_t;
    conditions.push_back(jc);
  }
  return nlohmann::json{{"valid", cert.valid},
                        {"numeric_only", cert.numeric_only},
                        {"t0", cert.t0},
                        {"conditions", conditions}};
}

}  // namespace

std::string report_to_json(const RunReport& report,
                           const std::optional<GameConstants>& constants,
                           const Trajectory* trajectory) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["iterations"] = report.iterations;
  j["early_stopped"] = report.early_stopped;
  j["wall_seconds"] = report.wall_seconds;

  nlohmann::json verdicts;
  verdicts["converged"] = report.converged;
  verdicts["final_violation"] = report.final_violation;
  verdicts["final_vi_residual"] = report.final_vi_residual;
  verdicts["residual_method"] = report.residual_method;
  verdicts["tol_violation"] = report.tol_violation;
  verdicts["tol_residual"] = report.tol_residual;
  verdicts["lambda_unbounded"] = report.lambda_unbounded;
  verdicts["sup_lambda_norm"] = report.sup_lambda_norm;
  if (report.final_distance >= 0.0) {
    verdicts["final_distance"] = report.final_distance;
    verdicts["final_lambda_gap"] = report.final_lambda_gap;
  }
  if (report.theorem2) {
    verdicts["theorem2"] = {{"holds", report.theorem2->holds},
                            {"max_rel_violation", report.theorem2->max_rel_violation},
                            {"worst_horizon", report.theorem2->worst_horizon}};
  }
  j["verdicts"] = verdicts;

  if (constants) {
    j["constants"] = {{"c1", constants->c1},   {"c2", constants->c2},
                      {"c3", constants->c3},   {"k", constants->k},
                      {"ctilde1", constants->ctilde1()},
                      {"ctilde2", constants->ctilde2()}};
  }
  if (report.certificate) j["certificate"] = certificate_json(*report.certificate);
  if (!report.notes.empty()) j["notes"] = report.notes;

  if (trajectory && !trajectory->points.empty()) {
    const auto& last = trajectory->final_point();
    nlohmann::json fin;
    fin["t"] = last.t;
    fin["x"] = std::vector<double>(last.x_flat.data(),
                                   last.x_flat.data() + last.x_flat.size());
    fin["lambda"] = std::vector<double>(last.lambda.data(),
                                        last.lambda.data() + last.lambda.size());
    j["final"] = fin;
  }
  return j.dump(2);
}

}  // namespace maal
