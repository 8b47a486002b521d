// Acceptance suite: every release-gating property, one pass/fail line each.
// Run directly or through ctest; exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "maal/diagnostics.hpp"
#include "maal/geometry.hpp"
#include "maal/oracle.hpp"
#include "maal/scenarios.hpp"

using namespace maal;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> body;
  double time_limit_s;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct ScenarioRun {
  Game game;
  std::vector<Regularizer> regs;
  GameConstants constants;
  Schedule schedule;
  RunResult result;
  KktSolution oracle;
};

ScenarioRun execute(const std::string& name, long horizon, bool ledger) {
  const Scenario sc = builtin(name);
  ScenarioRun out{sc.build_game(), sc.build_regularizers(), {}, Schedule{}, {}, {}};
  double modulus = 1.0;
  for (const auto& r : out.regs) modulus = std::min(modulus, r.strong_convexity());
  out.constants = estimate_constants(out.game, 20000, sc.seed, modulus);
  out.schedule = sc.build_schedule(out.constants);

  RunConfig config;
  config.horizon = horizon;
  config.stride = 1000;
  config.record_ledger = ledger;
  config.certificate = validate_schedule(out.schedule, out.constants, 100000);
  out.result = run(out.game, out.regs, out.schedule, zero_duals(out.game),
                   Vector::Zero(out.game.constraint().num_rows()), config);
  out.oracle = solve_lq_kkt(out.game);
  return out;
}

bool criterion1(std::string& detail) {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::box(Vector::Constant(3, -1.0), Vector::Ones(3)));
  const Regularizer ent = Regularizer::entropic(3);
  const DiagnosticReport a = check_proposition1(euc, 10000, 101);
  const DiagnosticReport b = check_proposition1(ent, 10000, 102);
  const DiagnosticReport fault = check_proposition1(euc.with_claimed_modulus(10.0), 10000, 103);
  detail = "max violations " + fmt(a.max_violation) + " / " +
           fmt(b.max_violation) + ", fault violations " +
           std::to_string(fault.violations);
  return a.passed && a.max_violation <= 1e-8 && b.passed && b.max_violation <= 1e-8 &&
         !fault.passed;
}

bool criterion2(std::string& detail) {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::box(Vector::Zero(3), Vector::Ones(3)));
  const Regularizer ent = Regularizer::entropic(3);

  const DiagnosticReport g1 = check_gradient_identity(euc, 1000, 201);
  const DiagnosticReport g2 = check_gradient_identity(ent, 1000, 202);
  const DiagnosticReport l1 = check_mirror_lipschitz(euc, 10000, 203);
  const DiagnosticReport l2 = check_mirror_lipschitz(ent, 10000, 204);

  const Regularizer ent2 = Regularizer::entropic(2);
  Vector y(2);
  y << std::log(2.0), 0.0;
  const Vector img = ent2.mirror(y);
  const Vector uniform = Regularizer::entropic(3).mirror(Vector::Zero(3));
  const bool logit_ok = std::abs(img(0) - 2.0 / 3.0) <= 1e-12 &&
                        std::abs(img(1) - 1.0 / 3.0) <= 1e-12 &&
                        (uniform - Vector::Constant(3, 1.0 / 3.0)).norm() <= 1e-12;

  detail = "grad-id max err " + fmt(std::max(g1.max_violation, g2.max_violation)) +
           ", lipschitz slack " + fmt(std::max(l1.max_violation, l2.max_violation));
  return g1.passed && g2.passed && l1.passed && l2.passed && logit_ok;
}

bool criterion3(std::string& detail) {
  detail.clear();
  for (const auto* name : {"lq2", "cournot_capacity"}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioRun sr = execute(name, 100000, /*ledger=*/true);
    const Theorem2Report rep = check_theorem2(sr.game, sr.regs, sr.result.ledger,
                                              sr.constants, sr.oracle.x, sr.oracle.lambda);
    GameConstants faulty = sr.constants;
    faulty.c1 *= std::sqrt(1e-3);
    faulty.c3 *= std::sqrt(1e-3);
    const Theorem2Report bad = check_theorem2(sr.game, sr.regs, sr.result.ledger, faulty,
                                              sr.oracle.x, sr.oracle.lambda);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail += std::string(name) + ": rel viol " + fmt(rep.max_rel_violation) +
              ", fault " + (bad.holds ? "MISSED" : "caught") + ", " +
              fmt(secs) + "s; ";
    if (!rep.holds || bad.holds || secs >= 60.0) return false;
  }
  return true;
}

bool criterion4(std::string& detail) {
  const GameConstants gc = estimate_constants(builtin("lq2").build_game(), 20000, 1);
  const ScheduleCertificate good =
      validate_schedule(Schedule::harmonic(1.0, 2.0 * gc.ctilde2() + 1.0), gc, 100000);
  const ScheduleCertificate constant =
      validate_schedule(Schedule::power(1.0, 0.0, 2.0 * gc.ctilde2() + 1.0), gc, 100000);
  const ScheduleCertificate no_theta =
      validate_schedule(Schedule::harmonic(1.0, 0.0), gc, 100000);

  const ConditionCheck* cfail = constant.failing();
  const ConditionCheck* tfail = no_theta.failing();
  detail = "t0=" + std::to_string(good.t0) + ", constant fails " +
           (cfail ? cfail->name : "?") + ", theta=0 fails " + (tfail ? tfail->name : "?");
  return good.valid && good.t0 >= 0 && !constant.valid && cfail &&
         cfail->name == "ratio_gamma_sq" && !no_theta.valid && tfail &&
         tfail->name == "pointwise";
}

bool convergence_case(const std::string& name, long horizon, std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioRun sr = execute(name, horizon, /*ledger=*/false);
  const double dist =
      (concat_profile(sr.result.final_state.x) - concat_profile(sr.oracle.x)).norm();
  const double viol =
      project_nonneg(sr.game.constraint().apply(sr.result.final_state.x)).norm();
  const double lgap = (sr.result.final_state.lambda - sr.oracle.lambda).norm();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail += name + ": |X-x*|=" + fmt(dist) + " viol=" + fmt(viol) +
            " |l-l*|=" + fmt(lgap) + " " + fmt(secs) + "s; ";
  return dist <= 1e-3 && viol <= 1e-3 && lgap <= 1e-2 && secs < 120.0;
}

bool criterion5(std::string& detail) {
  detail.clear();
  const bool a = convergence_case("lq2", 200000, detail);
  const bool b = convergence_case("cournot_capacity", 300000, detail);
  return a && b;
}

bool criterion6(std::string& detail) {
  detail.clear();
  double worst = 0.0;
  for (const auto* name : {"lq2", "cournot_capacity"}) {
    const Game game = builtin(name).build_game();
    const KktSolution a = solve_lq_kkt(game);
    const KktSolution b = solve_extragradient_auto(game);
    const double gap =
        std::max((concat_profile(a.x) - concat_profile(b.x)).lpNorm<Eigen::Infinity>(),
                 (a.lambda - b.lambda).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, gap);
    if (a.max_residual() > 1e-6 || b.max_residual() > 1e-6) return false;
  }
  // the two 1-d micro instances with slack and binding rows
  for (double cap : {1.0, 0.25}) {
    std::vector<PlayerSpec> players;
    players.emplace_back(0, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
                         [](const Profile& x) {
                           return Vector(Vector::Constant(1, 1.0 - 2.0 * x[0](0)));
                         });
    Matrix a(1, 1);
    a << 1.0;
    Game game(std::move(players), AffineConstraint(a, Vector::Constant(1, cap), {1}));
    const KktSolution ka = solve_lq_kkt(game);
    const KktSolution kb = solve_extragradient_auto(game);
    const double gap = std::max(std::abs(ka.x[0](0) - kb.x[0](0)),
                                std::abs(ka.lambda(0) - kb.lambda(0)));
    worst = std::max(worst, gap);
    if (ka.max_residual() > 1e-6 || kb.max_residual() > 1e-6) return false;
  }
  detail = "worst cross-oracle gap " + fmt(worst);
  return worst <= 1e-5;
}

bool criterion7(std::string& detail) {
  const Game game = builtin("lq2").build_game();
  const KktSolution sol = solve_lq_kkt(game);

  // Prop 2 direction: the VI solution passes the Nash grid check
  const NashReport nash = check_nash(game, sol.x, 1e-2);

  // Prop 4: both residuals of the oracle pair vanish
  const bool prop4 = vi_residual_feasible(game, sol.x).value <= 1e-8 &&
                     vi_residual_extended(game, sol.x, sol.lambda, 4.0).value <= 1e-8;

  // Prop 5 on the monotone scenario: grid VS set == grid SOL set over Q
  const DiscretizedSet qgrid = discretize_feasible(game, 1e-2);
  const auto field = [&](const Vector& z) {
    return game.gradients_flat(split_profile(z, game.dims()));
  };
  const VsSolReport vs_sol = check_vs_equals_sol(field, qgrid, 1.0, ExecMode::Parallel);

  // and for the gradient of a concave function: both sets are its argmax
  const DiscretizedSet line =
      discretize_set(ActionSet::box(Vector::Zero(1), Vector::Ones(1)), 1e-2);
  const auto grad = [](const Vector& x) { return Vector(-2.0 * (x.array() - 0.4)); };
  const VsSolReport argmax_rep = check_vs_equals_sol(grad, line);
  bool argmax_ok = argmax_rep.equal;
  for (long k : argmax_rep.vs_members)
    argmax_ok = argmax_ok && std::abs(line.points[static_cast<size_t>(k)](0) - 0.4) <= 3e-2;

  detail = "nash improvement " + fmt(nash.improvements[0]) + "/" +
           fmt(nash.improvements[1]) + ", Q-grid " +
           std::to_string(qgrid.points.size()) + " pts, vs/sol hausdorff " +
           fmt(vs_sol.hausdorff);
  return nash.certified && prop4 && vs_sol.equal && argmax_ok;
}

bool criterion8(std::string& detail) {
  const Scenario sc = builtin("cournot_capacity");
  const Game game = sc.build_game();
  const auto regs = sc.build_regularizers();
  RunConfig config;
  config.horizon = 20000;
  config.stride = 500;
  config.allow_unvalidated_schedule = true;
  config.record_ledger = false;

  const Schedule sched = Schedule::harmonic(1.0, 2.0);
  const RunResult r1 = run(game, regs, sched, zero_duals(game), Vector::Zero(1), config);
  const RunResult r2 = run(game, regs, sched, zero_duals(game), Vector::Zero(1), config);
  RunConfig par = config;
  par.mode = ExecMode::Parallel;
  const RunResult r3 = run(game, regs, sched, zero_duals(game), Vector::Zero(1), par);

  bool identical = r1.trajectory.points.size() == r2.trajectory.points.size() &&
                   r1.trajectory.points.size() == r3.trajectory.points.size();
  for (size_t k = 0; identical && k < r1.trajectory.points.size(); ++k) {
    const auto& p1 = r1.trajectory.points[k];
    identical = p1.x_flat == r2.trajectory.points[k].x_flat &&
                p1.lambda == r2.trajectory.points[k].lambda &&
                p1.y_flat == r2.trajectory.points[k].y_flat &&
                p1.x_flat == r3.trajectory.points[k].x_flat &&
                p1.lambda == r3.trajectory.points[k].lambda &&
                p1.y_flat == r3.trajectory.points[k].y_flat;
  }

  // taint: poisoning another player's private data must not leak into a
  // player's update when its own view is unchanged
  auto make_pair_game = [](double poison) {
    std::vector<PlayerSpec> players;
    players.emplace_back(0, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
                         [](const Profile& x) {
                           return Vector(Vector::Constant(1, 1.0 - x[0](0)));
                         });
    players.emplace_back(1, ActionSet::box(Vector::Zero(1), Vector::Ones(1)),
                         [poison](const Profile& x) {
                           return Vector(Vector::Constant(1, poison * (1.0 - x[1](0))));
                         });
    Matrix a(1, 2);
    a << 1.0, 1.0;
    return Game(std::move(players), AffineConstraint(a, Vector::Ones(1), {1, 1}));
  };
  const Game ga = make_pair_game(1.0);
  const Game gb = make_pair_game(-417.25);
  const std::vector<Regularizer> regs2 = {
      Regularizer::euclidean(ga.player(0).action_set),
      Regularizer::euclidean(ga.player(1).action_set)};
  RunConfig one;
  one.horizon = 1;
  one.stride = 1;
  one.allow_unvalidated_schedule = true;
  const RunResult sa = run(ga, regs2, sched, zero_duals(ga), Vector::Zero(1), one);
  const RunResult sb = run(gb, regs2, sched, zero_duals(gb), Vector::Zero(1), one);
  const bool taint_clean =
      sa.trajectory.final_point().y_flat(0) == sb.trajectory.final_point().y_flat(0);

  detail = std::string("bit-identical=") + (identical ? "yes" : "NO") +
           ", taint-clean=" + (taint_clean ? "yes" : "NO");
  return identical && taint_clean;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"1 fenchel coupling inequalities (1e4 triples, both regularizers, fault detected)",
       criterion1, 10.0},
      {"2 mirror-map identities (conjugate gradient, 1/K-Lipschitz, logit values)",
       criterion2, 60.0},
      {"3 summed drift bound ledger on lq2 and cournot (T=1e5, fault caught)",
       criterion3, 120.0},
      {"4 schedule certification (harmonic passes with t0; constant and theta=0 fail)",
       criterion4, 60.0},
      {"5 convergence vs oracle (lq2 T=2e5, cournot T=3e5)", criterion5, 240.0},
      {"6 cross-oracle agreement within 1e-5, residuals certified", criterion6, 60.0},
      {"7 variational structure at grid scale (nash, extended pair, vs=sol)",
       criterion7, 60.0},
      {"8 determinism and information locality", criterion8, 60.0},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit_s) {
      ok = false;
      detail += " [exceeded " + std::to_string(c.time_limit_s) + "s budget]";
    }
    std::printf("[%s] criterion %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.name.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
