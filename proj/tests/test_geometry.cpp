#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "maal/geometry.hpp"

using namespace maal;

namespace {
Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_CASE("orthant projection clamps negatives") {
  CHECK((project_nonneg(vec2(-1.0, 2.0)) - vec2(0.0, 2.0)).norm() == 0.0);
}

TEST_CASE("simplex projection fixed points and symmetry") {
  const ActionSet s = ActionSet::simplex(3);
  CHECK((project(s, vec3(1, 0, 0)) - vec3(1, 0, 0)).norm() <= 1e-15);
  CHECK((project(s, vec3(0.5, 0.5, 0.5)) - vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)).norm() <= 1e-15);
}

TEST_CASE("simplex projection output is a distribution") {
  const ActionSet s = ActionSet::simplex(4);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 2000; ++t) {
    Vector p(4);
    for (int j = 0; j < 4; ++j) p(j) = g(rng);
    const Vector x = project(s, p);
    CHECK(std::abs(x.sum() - 1.0) <= 1e-12);
    CHECK(x.minCoeff() >= 0.0);
  }
}

TEST_CASE("projection is idempotent and non-expansive") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  const std::vector<ActionSet> sets = {
      ActionSet::box(vec2(-1, 0), vec2(1, 2)),
      ActionSet::simplex(2),
      ActionSet::ball(vec2(0.5, -0.5), 1.5),
  };
  for (const auto& s : sets) {
    for (int t = 0; t < 1000; ++t) {
      Vector p(2), q(2);
      for (int j = 0; j < 2; ++j) p(j) = g(rng);
      for (int j = 0; j < 2; ++j) q(j) = g(rng);
      const Vector pp = project(s, p);
      CHECK((project(s, pp) - pp).norm() <= 1e-12);
      CHECK((project(s, p) - project(s, q)).norm() <= (p - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("Dykstra on a polytope matches the closed-form box projection") {
  // the box [0,1]^2 written as four halfspaces
  Matrix rows(4, 2);
  rows << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector offs(4);
  offs << 1, 0, 1, 0;
  const ActionSet poly = ActionSet::polytope(rows, offs);
  const ActionSet box = ActionSet::box(vec2(0, 0), vec2(1, 1));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    Vector p(2);
    p << g(rng), g(rng);
    CHECK((project(poly, p) - project(box, p)).norm() <= 1e-8);
  }
}

TEST_CASE("Dykstra on a triangle") {
  Matrix rows(3, 2);
  rows << -1, 0, 0, -1, 1, 1;
  Vector offs(3);
  offs << 0, 0, 1;
  const ActionSet tri = ActionSet::polytope(rows, offs);
  CHECK((project(tri, vec2(1.0, 1.0)) - vec2(0.5, 0.5)).norm() <= 1e-8);
  CHECK((project(tri, vec2(0.2, 0.3)) - vec2(0.2, 0.3)).norm() <= 1e-12);
  CHECK((tri.bbox_lower() - vec2(0, 0)).norm() <= 1e-9);
  CHECK((tri.bbox_upper() - vec2(1, 1)).norm() <= 1e-9);
}

TEST_CASE("norm helper") {
  CHECK(norm_value(vec2(1, -2), NormKind::L1) == doctest::Approx(3.0));
  CHECK(norm_value(vec2(3, 4), NormKind::L2) == doctest::Approx(5.0));
  CHECK(norm_value(vec2(3, 4), NormKind::Linf) == doctest::Approx(4.0));
}

TEST_CASE("action set construction rejects degenerate inputs") {
  CHECK_THROWS_AS(ActionSet::box(vec2(0, 1), vec2(1, 0)), Error);
  CHECK_THROWS_AS(ActionSet::ball(vec2(0, 0), 0.0), Error);
  CHECK_THROWS_AS(ActionSet::simplex(0), Error);
  // unbounded polytope: single halfspace
  CHECK_THROWS_AS(ActionSet::polytope(Matrix::Ones(1, 2), Vector::Ones(1)), Error);
  // empty polytope: x <= -1 and -x <= 0
  Matrix rows(2, 1);
  rows << 1, -1;
  Vector offs(2);
  offs << -1, 0;
  CHECK_THROWS_AS(ActionSet::polytope(rows, offs), Error);
}

TEST_CASE("support points maximize over samples") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<ActionSet> sets = {
      ActionSet::box(vec3(-1, 0, 2), vec3(1, 2, 3)),
      ActionSet::simplex(3),
      ActionSet::ball(vec3(1, 1, 1), 2.0),
  };
  for (const auto& s : sets) {
    for (int t = 0; t < 300; ++t) {
      Vector c(3);
      for (int j = 0; j < 3; ++j) c(j) = g(rng);
      const double sup = s.support(c);
      const Vector x = s.sample(rng);
      CHECK(c.dot(x) <= sup + 1e-9);
      CHECK(s.contains(s.support_point(c), 1e-9));
    }
  }
}

TEST_CASE("samples land inside their sets") {
  std::mt19937_64 rng(17);
  Matrix rows(3, 2);
  rows << -1, 0, 0, -1, 1, 1;
  const std::vector<ActionSet> sets = {
      ActionSet::box(vec2(-1, 0), vec2(1, 2)),
      ActionSet::simplex(2),
      ActionSet::ball(vec2(0, 0), 1.0),
      ActionSet::polytope(rows, vec3(0, 0, 1)),
  };
  for (const auto& s : sets)
    for (int t = 0; t < 500; ++t) CHECK(s.contains(s.sample(rng), 1e-9));
}

TEST_CASE("box vertices enumerate the extreme points") {
  const ActionSet b = ActionSet::box(vec2(0, -1), vec2(2, 1));
  CHECK(b.vertex_count() == 4);
  double best = -1e18;
  const Vector c = vec2(1.0, -2.0);
  for (long k = 0; k < b.vertex_count(); ++k) best = std::max(best, c.dot(b.vertex(k)));
  CHECK(best == doctest::Approx(b.support(c)));
}
