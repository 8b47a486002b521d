#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "maal/diagnostics.hpp"
#include "maal/oracle.hpp"
#include "maal/scenarios.hpp"

namespace maal {
namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kValidationFailure = 2;

struct CommonOpts {
  std::string builtin_name;
  std::string scenario_path;
  long samples = 20000;
};

Scenario resolve_scenario(const CommonOpts& opts) {
  if (!opts.builtin_name.empty() && !opts.scenario_path.empty())
    throw Error("pass either --builtin or --scenario, not both");
  if (!opts.builtin_name.empty()) return builtin(opts.builtin_name);
  if (!opts.scenario_path.empty()) return load_scenario(opts.scenario_path);
  throw Error("one of --builtin or --scenario is required");
}

std::string output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MAAL_OUT_DIR"); env && *env) return env;
  return ".";
}

void print_certificate(const ScheduleCertificate& cert, std::ostream& os) {
  os << "schedule certificate: " << (cert.valid ? "VALID" : "INVALID")
     << (cert.numeric_only ? " (numeric checks only)" : "") << "\n";
  for (const auto& c : cert.conditions) {
    os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail;
    if (c.witness_t >= 0) os << " (witness t=" << c.witness_t << ")";
    os << "\n";
  }
  if (cert.t0 >= 0) os << "  pointwise condition holds from t0=" << cert.t0 << "\n";
}

std::optional<ReferencePoint> oracle_reference(const Game& game,
                                               const Scenario& scenario,
                                               std::vector<std::string>& notes) {
  if (scenario.reference) return scenario.reference;
  try {
    const KktSolution sol = solve_lq_kkt(game);
    return ReferencePoint{sol.x, sol.lambda};
  } catch (const Error&) {
    // not an LQ/box instance; fall through
  }
  try {
    const KktSolution sol = solve_extragradient_auto(game);
    return ReferencePoint{sol.x, sol.lambda};
  } catch (const Error& e) {
    notes.push_back(std::string("no oracle reference available: ") + e.what());
    return std::nullopt;
  }
}

int cmd_run(const CommonOpts& common, const std::string& schedule_family,
            double gamma0, const std::string& delta_arg, double exponent,
            long horizon, long stride, const std::string& out_flag, bool parallel,
            bool no_validate, bool no_ledger, double early_stop_tol) {
  Scenario scenario = resolve_scenario(common);
  if (!schedule_family.empty()) {
    if (schedule_family == "harmonic")
      scenario.schedule.family = ScheduleFamily::Harmonic;
    else if (schedule_family == "power")
      scenario.schedule.family = ScheduleFamily::Power;
    else
      throw Error("--schedule must be harmonic or power");
  }
  if (gamma0 > 0.0) scenario.schedule.gamma0 = gamma0;
  if (exponent >= 0.0) scenario.schedule.exponent = exponent;
  if (!delta_arg.empty()) {
    if (delta_arg == "auto")
      scenario.schedule.delta = std::nullopt;
    else
      scenario.schedule.delta = std::stod(delta_arg);
  }
  if (horizon > 0) scenario.horizon = horizon;
  if (stride > 0) scenario.stride = stride;

  const Game game = scenario.build_game();
  const auto regs = scenario.build_regularizers();
  double modulus = 1.0;
  for (const auto& r : regs) modulus = std::min(modulus, r.strong_convexity());
  const GameConstants constants =
      estimate_constants(game, common.samples, scenario.seed, modulus);
  const Schedule schedule = scenario.build_schedule(constants);

  const ScheduleCertificate cert =
      check_theorem3_preconditions(schedule, constants, std::min(scenario.horizon, 100000L));
  print_certificate(cert, std::cout);
  if (!cert.valid && !no_validate) {
    std::cout << "aborting: schedule failed validation (use --no-validate to waive)\n";
    return kValidationFailure;
  }

  RunConfig config;
  config.horizon = scenario.horizon;
  config.stride = scenario.stride;
  config.record_ledger = !no_ledger;
  config.mode = parallel ? ExecMode::Parallel : ExecMode::Serial;
  config.certificate = cert;
  config.allow_unvalidated_schedule = no_validate;
  config.early_stop_tol = early_stop_tol;

  const RunResult result = run(game, regs, schedule,
                               zero_duals(game),
                               Vector::Zero(game.constraint().num_rows()), config);

  std::vector<std::string> notes;
  const auto reference = oracle_reference(game, scenario, notes);
  RunReport report = convergence_metrics(game, regs, result, reference);
  report.scenario = scenario.name;
  report.certificate = cert;
  for (auto& n : notes) report.notes.push_back(std::move(n));
  if (config.record_ledger && reference) {
    report.theorem2 = check_theorem2(game, regs, result.ledger, constants,
                                     reference->x, reference->lambda);
  }

  namespace fs = std::filesystem;
  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);
  const std::string csv_path = (dir / (scenario.name + "_trajectory.csv")).string();
  const std::string json_path = (dir / (scenario.name + "_summary.json")).string();
  write_trajectory_csv(csv_path, result.trajectory, report);
  {
    std::ofstream out(json_path);
    out << report_to_json(report, constants, &result.trajectory) << "\n";
  }

  std::cout << "run: " << scenario.name << " horizon=" << result.iterations
            << (result.early_stopped ? " (early stop)" : "") << " wall="
            << result.wall_seconds << "s\n"
            << "  final violation " << report.final_violation << ", vi residual "
            << report.final_vi_residual << " (" << report.residual_method << ")\n";
  if (report.final_distance >= 0.0)
    std::cout << "  distance to reference " << report.final_distance
              << ", lambda gap " << report.final_lambda_gap << "\n";
  if (report.theorem2)
    std::cout << "  drift bound: " << (report.theorem2->holds ? "holds" : "VIOLATED")
              << " (max rel violation " << report.theorem2->max_rel_violation << ")\n";
  std::cout << "  convergence verdict: " << (report.converged ? "pass" : "fail") << "\n"
            << "  wrote " << csv_path << " and " << json_path << "\n";
  return kOk;
}

int cmd_validate_schedule(const CommonOpts& common, const std::string& family,
                          double gamma0, const std::string& delta_arg, double exponent,
                          double ctilde2_flag, long tmax) {
  GameConstants constants;
  if (!common.builtin_name.empty() || !common.scenario_path.empty()) {
    const Scenario scenario = resolve_scenario(common);
    const Game game = scenario.build_game();
    const auto regs = scenario.build_regularizers();
    double modulus = 1.0;
    for (const auto& r : regs) modulus = std::min(modulus, r.strong_convexity());
    constants = estimate_constants(game, common.samples, scenario.seed, modulus);
  } else {
    // stand-alone mode: only Ctilde2 = C2^2/(2K) matters for the conditions
    constants.c1 = 1.0;
    constants.c3 = 1.0;
    constants.k = 0.5;
    constants.c2 = std::sqrt(ctilde2_flag);
    std::cout << "note: no game given, using Ctilde2=" << ctilde2_flag
              << " (override with --ctilde2)\n";
  }

  double delta;
  if (delta_arg == "auto")
    delta = 2.0 * constants.ctilde2() * (1.0 + kAutoDeltaMargin);
  else
    delta = std::stod(delta_arg);

  Schedule schedule;
  if (family == "harmonic")
    schedule = Schedule::harmonic(gamma0, delta);
  else if (family == "power")
    schedule = Schedule::power(gamma0, exponent, delta);
  else
    throw Error("--family must be harmonic or power");

  const ScheduleCertificate cert = validate_schedule(schedule, constants, tmax);
  print_certificate(cert, std::cout);
  if (!cert.valid) {
    const ConditionCheck* f = cert.failing();
    std::cout << "failed condition: " << (f ? f->name : "?") << "\n";
    return kValidationFailure;
  }
  return kOk;
}

int cmd_check_game(const CommonOpts& common) {
  const Scenario scenario = resolve_scenario(common);
  const Game game = scenario.build_game();

  const SlaterCertificate slater = check_slater(game);
  nlohmann::json j;
  j["scenario"] = scenario.name;
  j["slater"] = {{"holds", slater.holds}, {"margin", slater.margin}};
  if (slater.point.size() > 0)
    j["slater"]["point"] =
        std::vector<double>(slater.point.data(), slater.point.data() + slater.point.size());
  if (!slater.note.empty()) j["slater"]["note"] = slater.note;

  bool concave_ok = true;
  nlohmann::json jc = nlohmann::json::array();
  for (int i = 0; i < game.num_players(); ++i) {
    const DiagnosticReport rep = check_concavity(game, i, 200, scenario.seed + i);
    jc.push_back({{"player", i},
                  {"passed", rep.passed},
                  {"violations", rep.violations},
                  {"max_violation", rep.max_violation}});
    concave_ok = concave_ok && rep.passed;
  }
  j["concavity"] = jc;

  double modulus = 1.0;
  for (const auto& r : scenario.build_regularizers())
    modulus = std::min(modulus, r.strong_convexity());
  const GameConstants constants =
      estimate_constants(game, common.samples, scenario.seed, modulus);
  j["constants"] = {{"c1", constants.c1},           {"c2", constants.c2},
                    {"c3", constants.c3},           {"k", constants.k},
                    {"ctilde1", constants.ctilde1()}, {"ctilde2", constants.ctilde2()}};

  std::cout << j.dump(2) << "\n";
  return (slater.holds && concave_ok) ? kOk : kValidationFailure;
}

int cmd_report(const CommonOpts& common, const std::string& trajectory_path,
               const std::string& out_flag) {
  const Scenario scenario = resolve_scenario(common);
  const Game game = scenario.build_game();
  const auto regs = scenario.build_regularizers();

  RunResult replay;
  replay.trajectory = read_trajectory_csv(trajectory_path);
  if (replay.trajectory.dims != game.dims() ||
      replay.trajectory.constraint_rows != game.constraint().num_rows())
    throw Error("report: trajectory dimensions do not match the scenario");
  replay.iterations = replay.trajectory.final_point().t;

  std::vector<std::string> notes;
  const auto reference = oracle_reference(game, scenario, notes);
  RunReport report = convergence_metrics(game, regs, replay, reference);
  report.scenario = scenario.name;
  for (auto& n : notes) report.notes.push_back(std::move(n));
  report.notes.push_back("recomputed from a stored trajectory (dual states and "
                         "drift ledger unavailable)");

  namespace fs = std::filesystem;
  const fs::path dir = output_dir(out_flag);
  fs::create_directories(dir);
  const std::string json_path = (dir / (scenario.name + "_replay_summary.json")).string();
  {
    std::ofstream out(json_path);
    out << report_to_json(report, std::nullopt, &replay.trajectory) << "\n";
  }
  std::cout << "report: final violation " << report.final_violation << ", vi residual "
            << report.final_vi_residual << ", converged "
            << (report.converged ? "yes" : "no") << "\n"
            << "  wrote " << json_path << "\n";
  return kOk;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"mirror ascent with augmented Lagrangian for coupled concave games"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* run_cmd = app.add_subcommand("run", "run the algorithm on a scenario");
  std::string schedule_family, delta_arg, out_flag;
  double gamma0 = -1.0, exponent = -1.0, early_stop_tol = 0.0;
  long horizon = -1, stride = -1;
  bool parallel = false, no_validate = false, no_ledger = false;
  run_cmd->add_option("--builtin", common.builtin_name, "built-in scenario name");
  run_cmd->add_option("--scenario", common.scenario_path, "scenario JSON file");
  run_cmd->add_option("--schedule", schedule_family, "harmonic|power");
  run_cmd->add_option("--gamma0", gamma0, "step-size scale");
  run_cmd->add_option("--delta", delta_arg, "augmentation factor or 'auto'");
  run_cmd->add_option("--exponent", exponent, "power-family exponent");
  run_cmd->add_option("--horizon", horizon, "iteration count");
  run_cmd->add_option("--stride", stride, "recording stride");
  run_cmd->add_option("--samples", common.samples, "samples for constant estimation");
  run_cmd->add_option("--out", out_flag, "output directory (default . or MAAL_OUT_DIR)");
  run_cmd->add_flag("--parallel", parallel, "run data-parallel loops under OpenMP");
  run_cmd->add_flag("--no-validate", no_validate, "waive schedule validation");
  run_cmd->add_flag("--no-ledger", no_ledger, "skip per-step drift ledger recording");
  run_cmd->add_option("--early-stop-tol", early_stop_tol,
                      "stop when residuals stay below this tolerance");

  auto* val_cmd = app.add_subcommand("validate-schedule", "certify step-size conditions");
  std::string family = "harmonic", theta_delta = "0";
  double vgamma0 = 1.0, vexponent = 1.0, ctilde2 = 1.0;
  long tmax = 100000;
  val_cmd->add_option("--family", family, "harmonic|power");
  val_cmd->add_option("--gamma0", vgamma0, "step-size scale");
  val_cmd->add_option("--theta-delta,--delta", theta_delta,
                      "augmentation factor or 'auto'");
  val_cmd->add_option("--exponent", vexponent, "power-family exponent");
  val_cmd->add_option("--builtin", common.builtin_name, "constants from a builtin");
  val_cmd->add_option("--scenario", common.scenario_path, "constants from a file");
  val_cmd->add_option("--ctilde2", ctilde2, "Ctilde2 when no game is given");
  val_cmd->add_option("--tmax", tmax, "exact pointwise check horizon");
  val_cmd->add_option("--samples", common.samples, "samples for constant estimation");

  auto* check_cmd = app.add_subcommand("check-game", "Slater, concavity and constants");
  check_cmd->add_option("--builtin", common.builtin_name, "built-in scenario name");
  check_cmd->add_option("--scenario", common.scenario_path, "scenario JSON file");
  check_cmd->add_option("--samples", common.samples, "samples for constant estimation");

  auto* report_cmd = app.add_subcommand("report", "recompute diagnostics from a CSV");
  std::string trajectory_path, report_out;
  report_cmd->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
  report_cmd->add_option("--builtin", common.builtin_name, "built-in scenario name");
  report_cmd->add_option("--scenario", common.scenario_path, "scenario JSON file");
  report_cmd->add_option("--out", report_out, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationFailure;
  }

  try {
    if (run_cmd->parsed())
      return cmd_run(common, schedule_family, gamma0, delta_arg, exponent, horizon,
                     stride, out_flag, parallel, no_validate, no_ledger, early_stop_tol);
    if (val_cmd->parsed())
      return cmd_validate_schedule(common, family, vgamma0, theta_delta, vexponent,
                                   ctilde2, tmax);
    if (check_cmd->parsed()) return cmd_check_game(common);
    if (report_cmd->parsed()) return cmd_report(common, trajectory_path, report_out);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kValidationFailure;
}

}  // namespace maal
