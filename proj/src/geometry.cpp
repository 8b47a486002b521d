#include "maal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maal {

Vector project_box(const Vector& lower, const Vector& upper, const Vector& p) {
  return p.cwiseMax(lower).cwiseMin(upper);
}

Vector project_ball(const Vector& center, double radius, const Vector& p) {
  const Vector d = p - center;
  const double n = d.norm();
  if (n <= radius) return p;
  return center + (radius / n) * d;
}

// Sort-and-threshold projection onto the probability simplex.
Vector project_simplex(const Vector& p) {
  const int d = static_cast<int>(p.size());
  std::vector<double> u(p.data(), p.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (int j = 0; j < d; ++j) {
    css += u[static_cast<size_t>(j)];
    const double t = (1.0 - css) / (j + 1);
    if (u[static_cast<size_t>(j)] + t > 0.0) tau = t;
  }
  return (p.array() + tau).max(0.0).matrix();
}

Vector project_nonneg(const Vector& point) { return point.cwiseMax(0.0); }

namespace {

// One halfspace <a,x> <= d.
Vector project_halfspace(const Vector& a, double d, const Vector& p) {
  const double viol = a.dot(p) - d;
  if (viol <= 0.0) return p;
  return p - (viol / a.squaredNorm()) * a;
}

Vector dykstra_polytope(const ActionSet& set, const Vector& point) {
  constexpr int kMaxSweeps = 10000;
  constexpr double kTol = 1e-10;
  const int m = static_cast<int>(set.rows().rows());
  Vector x = point;
  std::vector<Vector> increments(static_cast<size_t>(m), Vector::Zero(x.size()));
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const Vector x_prev = x;
    for (int r = 0; r < m; ++r) {
      Vector& inc = increments[static_cast<size_t>(r)];
      const Vector y = x + inc;
      const Vector z = project_halfspace(set.rows().row(r).transpose(), set.offsets()(r), y);
      inc = y - z;
      x = z;
    }
    const double change = (x - x_prev).norm();
    const double infeas = std::max(0.0, (set.rows() * x - set.offsets()).maxCoeff());
    if (change <= kTol && infeas <= kTol) return x;
  }
  const double residual = std::max(0.0, (set.rows() * x - set.offsets()).maxCoeff());
  throw DykstraError("project: Dykstra did not converge within sweep budget", x, residual);
}

}  // namespace

Vector project(const ActionSet& target, const Vector& point) {
  if (point.size() != target.dim()) throw Error("project: dimension mismatch");
  switch (target.kind()) {
    case SetKind::Box:
      return project_box(target.lower(), target.upper(), point);
    case SetKind::Simplex:
      return project_simplex(point);
    case SetKind::EuclideanBall:
      return project_ball(target.center(), target.radius(), point);
    case SetKind::HalfspacePolytope:
      return dykstra_polytope(target, point);
  }
  throw Error("project: unknown kind");
}

}  // namespace maal
