#include "maal/scenarios.hpp"

#include <fstream>

namespace maal {
namespace {

GradientOracle make_gradient(const UtilitySpec& spec, int self) {
  if (spec.family == UtilityFamily::Quadratic) {
    return [spec, self](const Profile& x) {
      Vector g = spec.q + spec.h * x[static_cast<size_t>(self)];
      for (const auto& [j, gij] : spec.cross) g += gij * x[static_cast<size_t>(j)];
      return g;
    };
  }
  // cournot: v_i = p0 - cost - s * (sum_j x_j + x_i)
  return [spec, self](const Profile& x) {
    double total = 0.0;
    for (const auto& xj : x) total += xj.sum();
    Vector g(1);
    g(0) = spec.p0 - spec.cost - spec.s * (total + x[static_cast<size_t>(self)](0));
    return g;
  };
}

UtilityOracle make_utility(const UtilitySpec& spec, int self) {
  if (spec.family == UtilityFamily::Quadratic) {
    return [spec, self](const Profile& x) {
      const Vector& xi = x[static_cast<size_t>(self)];
      double u = spec.q.dot(xi) + 0.5 * xi.dot(spec.h * xi);
      for (const auto& [j, gij] : spec.cross) u += xi.dot(gij * x[static_cast<size_t>(j)]);
      return u;
    };
  }
  return [spec, self](const Profile& x) {
    double total = 0.0;
    for (const auto& xj : x) total += xj.sum();
    const double xi = x[static_cast<size_t>(self)](0);
    return xi * (spec.p0 - spec.s * total) - spec.cost * xi;
  };
}

void validate_utility(const UtilitySpec& spec, int self, const std::vector<int>& dims,
                      const std::string& where) {
  const int d = dims[static_cast<size_t>(self)];
  if (spec.family == UtilityFamily::Quadratic) {
    if (spec.q.size() != d) throw SchemaError(where + "/q", "wrong dimension");
    if (spec.h.rows() != d || spec.h.cols() != d)
      throw SchemaError(where + "/h", "wrong shape");
    if ((spec.h - spec.h.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
      throw SchemaError(where + "/h", "own-block matrix must be symmetric");
    for (const auto& [j, gij] : spec.cross) {
      if (j < 0 || j >= static_cast<int>(dims.size()) || j == self)
        throw SchemaError(where + "/cross/" + std::to_string(j), "bad player index");
      if (gij.rows() != d || gij.cols() != dims[static_cast<size_t>(j)])
        throw SchemaError(where + "/cross/" + std::to_string(j), "wrong shape");
    }
  } else {
    if (d != 1) throw SchemaError(where, "cournot utilities require dim 1");
    if (!(spec.s > 0.0)) throw SchemaError(where + "/s", "price slope must be positive");
  }
}

}  // namespace

Game Scenario::build_game() const {
  std::vector<int> dims;
  dims.reserve(players.size());
  for (const auto& p : players) dims.push_back(p.set.dim());

  std::vector<PlayerSpec> specs;
  specs.reserve(players.size());
  for (int i = 0; i < static_cast<int>(players.size()); ++i) {
    const auto& p = players[static_cast<size_t>(i)];
    specs.emplace_back(i, p.set, make_gradient(p.utility, i),
                       make_utility(p.utility, i));
  }
  return Game(std::move(specs), AffineConstraint(a, b, dims));
}

std::vector<Regularizer> Scenario::build_regularizers() const {
  std::vector<Regularizer> regs;
  regs.reserve(players.size());
  for (const auto& p : players) {
    if (p.regularizer == RegularizerKind::Entropic) {
      if (p.set.kind() != SetKind::Simplex)
        throw Error("scenario: entropic regularizer requires a simplex set");
      regs.push_back(Regularizer::entropic(p.set.dim()));
    } else {
      regs.push_back(Regularizer::euclidean(p.set));
    }
  }
  return regs;
}

double Scenario::resolve_delta(const GameConstants& constants) const {
  if (schedule.delta) return *schedule.delta;
  return 2.0 * constants.ctilde2() * (1.0 + kAutoDeltaMargin);
}

Schedule Scenario::build_schedule(const GameConstants& constants) const {
  const double delta = resolve_delta(constants);
  switch (schedule.family) {
    case ScheduleFamily::Harmonic:
      return Schedule::harmonic(schedule.gamma0, delta);
    case ScheduleFamily::Power:
      return Schedule::power(schedule.gamma0, schedule.exponent, delta);
    case ScheduleFamily::Custom:
      throw Error("scenario: custom schedules cannot be described in a file");
  }
  throw Error("scenario: unknown schedule family");
}

Scenario builtin(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "lq2") {
    // two quadratic players on [0,1], one binding capacity row
    for (int i = 0; i < 2; ++i) {
      ScenarioPlayer p{ActionSet::box(Vector::Zero(1), Vector::Ones(1)), {},
                       RegularizerKind::Euclidean};
      p.utility.family = UtilityFamily::Quadratic;
      p.utility.q = Vector::Constant(1, 1.5);      // 2*a*c with a=1, c=0.75
      p.utility.h = Matrix::Constant(1, 1, -2.0);  // -2*a
      p.utility.cross[1 - i] = Matrix::Constant(1, 1, -0.25);
      s.players.push_back(std::move(p));
    }
    s.a = Matrix::Ones(1, 2);
    s.b = Vector::Ones(1);
    s.schedule = {ScheduleFamily::Harmonic, 1.0, 1.0, std::nullopt};
    s.horizon = 200000;
    s.stride = 1000;
    s.seed = 1;
  } else if (name == "cournot_capacity") {
    // three symmetric quantity setters under a shared capacity
    const int n = 3;
    for (int i = 0; i < n; ++i) {
      ScenarioPlayer p{ActionSet::box(Vector::Zero(1), Vector::Ones(1)), {},
                       RegularizerKind::Euclidean};
      p.utility.family = UtilityFamily::Cournot;
      p.utility.p0 = 2.0;
      p.utility.s = 1.0;
      p.utility.cost = 0.2;
      s.players.push_back(std::move(p));
    }
    s.a = Matrix::Ones(1, n);
    s.b = Vector::Constant(1, 1.2);
    s.schedule = {ScheduleFamily::Harmonic, 1.0, 1.0, std::nullopt};
    s.horizon = 300000;
    s.stride = 1000;
    s.seed = 2;
  } else if (name == "simplex_alloc") {
    // two players spread unit mass over three resources; resource 0 is capped
    const int d = 3;
    Vector pref(d);
    pref << 1.0, 0.4, 0.2;
    for (int i = 0; i < 2; ++i) {
      ScenarioPlayer p{ActionSet::simplex(d), {}, RegularizerKind::Entropic};
      p.utility.family = UtilityFamily::Quadratic;
      p.utility.q = pref;
      p.utility.h = -2.0 * Matrix::Identity(d, d);
      p.utility.cross[1 - i] = -0.5 * Matrix::Identity(d, d);
      s.players.push_back(std::move(p));
    }
    s.a = Matrix::Zero(1, 2 * d);
    s.a(0, 0) = 1.0;
    s.a(0, d) = 1.0;
    s.b = Vector::Constant(1, 0.8);
    s.schedule = {ScheduleFamily::Harmonic, 2.0, 1.0, std::nullopt};
    s.horizon = 200000;
    s.stride = 1000;
    s.seed = 3;
  } else {
    throw Error("unknown builtin scenario '" + name +
                "' (available: lq2, cournot_capacity, simplex_alloc)");
  }
  return s;
}

namespace {

Vector json_to_vector(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw SchemaError(where + "/" + std::to_string(k), "expected a number");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  if (!v.allFinite()) throw SchemaError(where, "values must be finite");
  return v;
}

Matrix json_to_matrix(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where, "expected a nested array");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw SchemaError(where, "expected a nested array");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(where + "/" + std::to_string(r), "ragged matrix row");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw SchemaError(where + "/" + std::to_string(r) + "/" + std::to_string(c),
                          "expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  if (!m.allFinite()) throw SchemaError(where, "values must be finite");
  return m;
}

nlohmann::json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

ActionSet set_from_json(const nlohmann::json& j, const std::string& where) {
  const std::string kind = j.value("kind", "");
  try {
    if (kind == "box")
      return ActionSet::box(json_to_vector(j.at("lower"), where + "/lower"),
                            json_to_vector(j.at("upper"), where + "/upper"));
    if (kind == "simplex") {
      if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw SchemaError(where + "/dim", "expected an integer");
      return ActionSet::simplex(j["dim"].get<int>());
    }
    if (kind == "euclidean_ball")
      return ActionSet::ball(json_to_vector(j.at("center"), where + "/center"),
                             j.at("radius").get<double>());
    if (kind == "halfspace_polytope")
      return ActionSet::polytope(json_to_matrix(j.at("rows"), where + "/rows"),
                                 json_to_vector(j.at("offsets"), where + "/offsets"));
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(where, e.what());
  }
  throw SchemaError(where + "/kind",
                    "unknown set kind (box, simplex, euclidean_ball, halfspace_polytope)");
}

nlohmann::json set_to_json(const ActionSet& s) {
  switch (s.kind()) {
    case SetKind::Box:
      return {{"kind", "box"}, {"lower", vector_to_json(s.lower())},
              {"upper", vector_to_json(s.upper())}};
    case SetKind::Simplex:
      return {{"kind", "simplex"}, {"dim", s.dim()}};
    case SetKind::EuclideanBall:
      return {{"kind", "euclidean_ball"}, {"center", vector_to_json(s.center())},
              {"radius", s.radius()}};
    case SetKind::HalfspacePolytope:
      return {{"kind", "halfspace_polytope"}, {"rows", matrix_to_json(s.rows())},
              {"offsets", vector_to_json(s.offsets())}};
  }
  throw Error("set_to_json: unknown kind");
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("/", "expected a JSON object");
  if (j.value("schema_version", -1) != 1)
    throw SchemaError("/schema_version", "unsupported or missing schema version");

  Scenario s;
  s.name = j.value("name", "unnamed");
  if (!j.contains("players") || !j["players"].is_array() || j["players"].empty())
    throw SchemaError("/players", "expected a non-empty array");

  std::vector<int> dims;
  for (size_t i = 0; i < j["players"].size(); ++i) {
    const std::string where = "/players/" + std::to_string(i);
    const auto& jp = j["players"][i];
    if (!jp.is_object()) throw SchemaError(where, "expected an object");
    if (!jp.contains("set")) throw SchemaError(where + "/set", "missing");
    ScenarioPlayer p{set_from_json(jp["set"], where + "/set"), {},
                     RegularizerKind::Euclidean};

    const std::string reg = jp.value("regularizer", "euclidean");
    if (reg == "entropic")
      p.regularizer = RegularizerKind::Entropic;
    else if (reg != "euclidean")
      throw SchemaError(where + "/regularizer", "must be euclidean or entropic");

    if (!jp.contains("utility") || !jp["utility"].is_object())
      throw SchemaError(where + "/utility", "missing");
    const auto& ju = jp["utility"];
    const std::string fam = ju.value("family", "");
    if (fam == "quadratic") {
      p.utility.family = UtilityFamily::Quadratic;
      p.utility.q = json_to_vector(ju.at("q"), where + "/utility/q");
      p.utility.h = json_to_matrix(ju.at("h"), where + "/utility/h");
      if (ju.contains("cross")) {
        if (!ju["cross"].is_object())
          throw SchemaError(where + "/utility/cross", "expected an object");
        for (const auto& [key, val] : ju["cross"].items()) {
          int other = -1;
          try {
            other = std::stoi(key);
          } catch (...) {
            throw SchemaError(where + "/utility/cross/" + key, "key must be a player index");
          }
          p.utility.cross[other] =
              json_to_matrix(val, where + "/utility/cross/" + key);
        }
      }
    } else if (fam == "cournot") {
      p.utility.family = UtilityFamily::Cournot;
      try {
        p.utility.p0 = ju.at("p0").get<double>();
        p.utility.s = ju.at("s").get<double>();
        p.utility.cost = ju.at("cost").get<double>();
      } catch (const std::exception& e) {
        throw SchemaError(where + "/utility", e.what());
      }
    } else {
      throw SchemaError(where + "/utility/family", "must be quadratic or cournot");
    }
    dims.push_back(p.set.dim());
    s.players.push_back(std::move(p));
  }
  for (size_t i = 0; i < s.players.size(); ++i)
    validate_utility(s.players[i].utility, static_cast<int>(i), dims,
                     "/players/" + std::to_string(i) + "/utility");

  if (!j.contains("constraint") || !j["constraint"].is_object())
    throw SchemaError("/constraint", "missing");
  s.a = json_to_matrix(j["constraint"].at("a"), "/constraint/a");
  s.b = json_to_vector(j["constraint"].at("b"), "/constraint/b");
  int total = 0;
  for (int d : dims) total += d;
  if (s.a.cols() != total)
    throw SchemaError("/constraint/a", "width must equal the sum of player dims");
  if (s.a.rows() != s.b.size()) throw SchemaError("/constraint/b", "row count mismatch");

  if (j.contains("schedule")) {
    const auto& js = j["schedule"];
    const std::string fam = js.value("family", "harmonic");
    if (fam == "harmonic")
      s.schedule.family = ScheduleFamily::Harmonic;
    else if (fam == "power")
      s.schedule.family = ScheduleFamily::Power;
    else
      throw SchemaError("/schedule/family", "must be harmonic or power");
    s.schedule.gamma0 = js.value("gamma0", 1.0);
    s.schedule.exponent = js.value("exponent", 1.0);
    if (js.contains("delta")) {
      if (js["delta"].is_string()) {
        if (js["delta"].get<std::string>() != "auto")
          throw SchemaError("/schedule/delta", "must be a number or \"auto\"");
        s.schedule.delta = std::nullopt;
      } else if (js["delta"].is_number()) {
        s.schedule.delta = js["delta"].get<double>();
      } else {
        throw SchemaError("/schedule/delta", "must be a number or \"auto\"");
      }
    }
    if (!(s.schedule.gamma0 > 0.0))
      throw SchemaError("/schedule/gamma0", "must be positive");
    if (s.schedule.exponent < 0.0 || s.schedule.exponent > 1.0)
      throw SchemaError("/schedule/exponent", "must lie in [0,1]");
  }

  s.horizon = j.value("horizon", 100000L);
  s.stride = j.value("stride", 1000L);
  s.seed = j.value("seed", 1UL);
  if (s.horizon < 1) throw SchemaError("/horizon", "must be >= 1");
  if (s.stride < 1) throw SchemaError("/stride", "must be >= 1");

  if (j.contains("reference")) {
    const auto& jr = j["reference"];
    if (!jr.is_object()) throw SchemaError("/reference", "expected an object");
    ReferencePoint ref;
    const Vector x = json_to_vector(jr.at("x"), "/reference/x");
    if (x.size() != total) throw SchemaError("/reference/x", "wrong dimension");
    ref.x = split_profile(x, dims);
    ref.lambda = json_to_vector(jr.at("lambda"), "/reference/lambda");
    if (ref.lambda.size() != s.b.size())
      throw SchemaError("/reference/lambda", "wrong dimension");
    s.reference = std::move(ref);
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["name"] = s.name;
  nlohmann::json players = nlohmann::json::array();
  for (const auto& p : s.players) {
    nlohmann::json jp;
    jp["set"] = set_to_json(p.set);
    jp["regularizer"] =
        p.regularizer == RegularizerKind::Entropic ? "entropic" : "euclidean";
    nlohmann::json ju;
    if (p.utility.family == UtilityFamily::Quadratic) {
      ju["family"] = "quadratic";
      ju["q"] = vector_to_json(p.utility.q);
      ju["h"] = matrix_to_json(p.utility.h);
      if (!p.utility.cross.empty()) {
        nlohmann::json cross;
        for (const auto& [k, v] : p.utility.cross) cross[std::to_string(k)] = matrix_to_json(v);
        ju["cross"] = cross;
      }
    } else {
      ju["family"] = "cournot";
      ju["p0"] = p.utility.p0;
      ju["s"] = p.utility.s;
      ju["cost"] = p.utility.cost;
    }
    jp["utility"] = ju;
    players.push_back(jp);
  }
  j["players"] = players;
  j["constraint"] = {{"a", matrix_to_json(s.a)}, {"b", vector_to_json(s.b)}};
  nlohmann::json js;
  js["family"] = s.schedule.family == ScheduleFamily::Power ? "power" : "harmonic";
  js["gamma0"] = s.schedule.gamma0;
  js["exponent"] = s.schedule.exponent;
  if (s.schedule.delta)
    js["delta"] = *s.schedule.delta;
  else
    js["delta"] = "auto";
  j["schedule"] = js;
  j["horizon"] = s.horizon;
  j["stride"] = s.stride;
  j["seed"] = s.seed;
  if (s.reference) {
    j["reference"] = {{"x", vector_to_json(concat_profile(s.reference->x))},
                      {"lambda", vector_to_json(s.reference->lambda)}};
  }
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_scenario: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw Error("save_scenario: cannot open " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace maal
