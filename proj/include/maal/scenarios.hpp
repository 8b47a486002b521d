#ifndef MAAL_SCENARIOS_HPP
#define MAAL_SCENARIOS_HPP

#include <map>

#include "maal/engine.hpp"

#include "json.hpp"

namespace maal {

enum class UtilityFamily { Quadratic, Cournot };

/// Closed-form utility families (gradients are exact):
///   quadratic: u_i = <q, x_i> + 0.5 x_i' H x_i + x_i' sum_j G_ij x_j
///   cournot:   u_i = x_i (p0 - s * sum_j x_j) - cost * x_i   (dim 1)
struct UtilitySpec {
  UtilityFamily family = UtilityFamily::Quadratic;
  Vector q;
  Matrix h;
  std::map<int, Matrix> cross;
  double p0 = 0.0;
  double s = 0.0;
  double cost = 0.0;
};

struct ScheduleSpec {
  ScheduleFamily family = ScheduleFamily::Harmonic;
  double gamma0 = 1.0;
  double exponent = 1.0;
  std::optional<double> delta;  // nullopt => auto: 2 * Ctilde2 * (1 + margin)
};

struct ScenarioPlayer {
  ActionSet set;
  UtilitySpec utility;
  RegularizerKind regularizer = RegularizerKind::Euclidean;
};

/// A fully data-described game instance: everything needed to rebuild the
/// oracles, the regularizers and the schedule, and to round-trip via JSON.
struct Scenario {
  std::string name;
  std::vector<ScenarioPlayer> players;
  Matrix a;
  Vector b;
  ScheduleSpec schedule;
  long horizon = 100000;
  long stride = 1000;
  std::uint64_t seed = 1;
  std::optional<ReferencePoint> reference;

  Game build_game() const;
  std::vector<Regularizer> build_regularizers() const;
  double resolve_delta(const GameConstants& constants) const;
  Schedule build_schedule(const GameConstants& constants) const;
};

/// Built-in instances: lq2, cournot_capacity, simplex_alloc.
Scenario builtin(const std::string& name);

/// Schema errors carry a JSON-pointer-style path to the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(what + " (at " + pointer + ")"), pointer(pointer) {}
  std::string pointer;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

/// The delta margin of the auto rule: delta = 2 * Ctilde2 * (1 + kAutoDeltaMargin).
inline constexpr double kAutoDeltaMargin = 0.5;

/// Command-line entry point (args exclude the program name).
/// Exit status: 0 success, 2 validation failure, 1 runtime error.
int cli_run(const std::vector<std::string>& args);

}  // namespace maal

#endif  // MAAL_SCENARIOS_HPP
