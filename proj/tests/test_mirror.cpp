#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "maal/mirror.hpp"

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

TEST_CASE("logit map values") {
  const Regularizer ent3 = Regularizer::entropic(3);
  CHECK((ent3.mirror(Vector::Zero(3)) - vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)).norm() <= 1e-15);

  const Regularizer ent2 = Regularizer::entropic(2);
  const Vector img = ent2.mirror(vec2(std::log(2.0), 0.0));
  CHECK(img(0) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(img(1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("logit map is overflow safe") {
  const Regularizer ent = Regularizer::entropic(2);
  const Vector img = ent.mirror(vec2(1e4, 0.0));
  CHECK(img.allFinite());
  CHECK(img(0) == doctest::Approx(1.0));
  CHECK(std::isfinite(ent.conjugate(vec2(1e4, 0.0))));
}

TEST_CASE("euclidean mirror map is the projection") {
  const Regularizer reg =
      Regularizer::euclidean(ActionSet::box(Vector::Zero(2), Vector::Ones(2)));
  CHECK((reg.mirror(vec2(2.0, -1.0)) - vec2(1.0, 0.0)).norm() == 0.0);
}

TEST_CASE("fenchel coupling closed-form values") {
  // interior image: F(p, y) = 0.5 ||p - y||^2
  const Regularizer ball =
      Regularizer::euclidean(ActionSet::ball(Vector::Zero(2), 10.0));
  CHECK(ball.fenchel(vec2(1, 0), Vector::Zero(2)) == doctest::Approx(0.5).epsilon(1e-12));

  // coupling vanishes at the mirror image
  const Regularizer ent = Regularizer::entropic(3);
  const Vector y = vec3(0.3, -1.2, 0.8);
  CHECK(ent.fenchel(ent.mirror(y), y) <= 1e-12);

  // KL((1,0) || (1/2,1/2)) = ln 2, computed directly as the oracle
  const Regularizer ent2 = Regularizer::entropic(2);
  const double kl_oracle = kl_divergence(vec2(1.0, 0.0), vec2(0.5, 0.5));
  CHECK(kl_oracle == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(ent2.fenchel(vec2(1.0, 0.0), Vector::Zero(2)) ==
        doctest::Approx(kl_oracle).epsilon(1e-12));
}

TEST_CASE("fenchel coupling equals the KL divergence to the logit image") {
  const Regularizer ent = Regularizer::entropic(3);
  std::mt19937_64 rng(42);
  for (int t = 0; t < 500; ++t) {
    const Vector p = ent.domain().sample(rng);
    Vector y(3);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int j = 0; j < 3; ++j) y(j) = g(rng);
    const double f = ent.fenchel(p, y);
    const double kl = kl_divergence(p, ent.mirror(y));
    CHECK(f == doctest::Approx(kl).epsilon(1e-9));
    CHECK(f >= -1e-12);
  }
}

TEST_CASE("kl divergence is infinite off the support") {
  CHECK(std::isinf(kl_divergence(vec2(0.5, 0.5), vec2(1.0, 0.0))));
}

TEST_CASE("fenchel rejects points outside the domain") {
  const Regularizer ent = Regularizer::entropic(2);
  CHECK_THROWS_AS(ent.fenchel(vec2(0.7, 0.7), Vector::Zero(2)), Error);
  const Regularizer box =
      Regularizer::euclidean(ActionSet::box(Vector::Zero(2), Vector::Ones(2)));
  CHECK_THROWS_AS(box.fenchel(vec2(1.5, 0.5), Vector::Zero(2)), Error);
}

TEST_CASE("fenchel coupling inequalities hold for both regularizers") {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::box(Vector::Constant(3, -1.0), Vector::Ones(3)));
  const DiagnosticReport r1 = check_proposition1(euc, 10000, 2024);
  CHECK(r1.passed);
  CHECK(r1.max_violation <= 1e-8);

  const Regularizer ent = Regularizer::entropic(3);
  const DiagnosticReport r2 = check_proposition1(ent, 10000, 2025);
  CHECK(r2.passed);
  CHECK(r2.max_violation <= 1e-8);
}

TEST_CASE("overstated modulus is detected") {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::box(Vector::Zero(2), Vector::Ones(2)));
  const DiagnosticReport rep = check_proposition1(euc.with_claimed_modulus(10.0), 2000, 7);
  CHECK_FALSE(rep.passed);
  CHECK(rep.violations > 0);
}

TEST_CASE("parallel and serial proposition sweeps agree bit for bit") {
  const Regularizer ent = Regularizer::entropic(4);
  const DiagnosticReport a = check_proposition1(ent, 5000, 99, ExecMode::Serial);
  const DiagnosticReport b = check_proposition1(ent, 5000, 99, ExecMode::Parallel);
  CHECK(a.max_violation == b.max_violation);
  CHECK(a.violations == b.violations);
}

TEST_CASE("strong convexity and mirror Lipschitz continuity") {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::ball(Vector::Zero(2), 2.0));
  CHECK(check_strong_convexity(euc, 4000, 1).passed);
  CHECK(check_mirror_lipschitz(euc, 10000, 2).passed);

  const Regularizer ent = Regularizer::entropic(4);
  CHECK(check_strong_convexity(ent, 4000, 3).passed);
  CHECK(check_mirror_lipschitz(ent, 10000, 4).passed);
}

TEST_CASE("mirror map is the conjugate gradient") {
  const Regularizer euc =
      Regularizer::euclidean(ActionSet::box(Vector::Zero(3), Vector::Ones(3)));
  const DiagnosticReport a = check_gradient_identity(euc, 1000, 5);
  CHECK(a.passed);
  const Regularizer ent = Regularizer::entropic(3);
  const DiagnosticReport b = check_gradient_identity(ent, 1000, 6);
  CHECK(b.passed);
}

TEST_CASE("reverse convergence along approaching dual sequences") {
  // euclidean: F ~ 1/(2 n^2) along Y_n = p + e1/n
  const ActionSet box = ActionSet::box(Vector::Zero(2), Vector::Ones(2));
  const Regularizer euc = Regularizer::euclidean(box);
  const Vector p = vec2(0.5, 0.5);
  const DiagnosticReport a = check_reverse_convergence(
      euc, p,
      [&](long n) { return Vector(p + Vector::Unit(2, 0) / static_cast<double>(n)); },
      2000);
  CHECK(a.passed);

  // entropic, interior target
  const Regularizer ent = Regularizer::entropic(3);
  const Vector q = vec3(0.2, 0.3, 0.5);
  const Vector logq = q.array().log().matrix();
  const DiagnosticReport b = check_reverse_convergence(
      ent, q,
      [&](long n) { return Vector(logq + Vector::Unit(3, 0) / static_cast<double>(n)); },
      2000);
  CHECK(b.passed);

  // entropic, vertex target approached at a polynomial rate: slow decay flagged
  const Vector vertex = vec3(1.0, 0.0, 0.0);
  const DiagnosticReport c = check_reverse_convergence(
      ent, vertex,
      [&](long n) {
        Vector qn(3);
        const double eps = 1.0 / static_cast<double>(n + 1);
        qn << 1.0 - eps, eps / 2, eps / 2;
        return Vector(qn.array().log().matrix());
      },
      2000);
  CHECK_FALSE(c.passed);
  REQUIRE(!c.notes.empty());
  CHECK(c.notes.front().find("slow decay") != std::string::npos);

  // a sequence that never approaches p is an error
  CHECK_THROWS_AS(check_reverse_convergence(
                      ent, vertex, [&](long) { return Vector(Vector::Zero(3)); }, 100),
                  Error);
}

TEST_CASE("total coupling is the exact sum of the blocks") {
  const std::vector<Regularizer> regs = {
      Regularizer::euclidean(ActionSet::box(Vector::Zero(2), Vector::Ones(2))),
      Regularizer::entropic(3)};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int t = 0; t < 200; ++t) {
    Profile x = {regs[0].domain().sample(rng), regs[1].domain().sample(rng)};
    Profile y(2);
    y[0] = Vector::NullaryExpr(2, [&](Eigen::Index) { return g(rng); });
    y[1] = Vector::NullaryExpr(3, [&](Eigen::Index) { return g(rng); });
    const double total = fenchel_total(regs, x, y);
    const double parts = regs[0].fenchel(x[0], y[0]) + regs[1].fenchel(x[1], y[1]);
    CHECK(total == parts);  // exact, same floating-point path
    // primal-dual variant adds the price distance
    Vector l1(1), l2(1);
    l1 << 0.25;
    l2 << 1.0;
    CHECK(fenchel_primal_dual(regs, x, y, l1, l2) ==
          doctest::Approx(total + 0.5 * (l2 - l1).squaredNorm()).epsilon(1e-15));
  }
}
