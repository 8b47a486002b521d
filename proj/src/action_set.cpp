#include "maal/action_set.hpp"

#include <algorithm>
#include <cmath>

#include "maal/geometry.hpp"
#include "maal/lp.hpp"

namespace maal {

ActionSet ActionSet::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw Error("box: bad dimensions");
  if (!lower.allFinite() || !upper.allFinite())
    throw Error("box: bounds must be finite (compact set required)");
  for (Eigen::Index j = 0; j < lower.size(); ++j)
    if (lower(j) > upper(j)) throw Error("box: lower bound exceeds upper bound");
  ActionSet s;
  s.kind_ = SetKind::Box;
  s.dim_ = static_cast<int>(lower.size());
  s.lower_ = lower;
  s.upper_ = upper;
  s.bbox_lower_ = std::move(lower);
  s.bbox_upper_ = std::move(upper);
  return s;
}

ActionSet ActionSet::simplex(int dim) {
  if (dim < 1) throw Error("simplex: dimension must be positive");
  ActionSet s;
  s.kind_ = SetKind::Simplex;
  s.dim_ = dim;
  s.bbox_lower_ = Vector::Zero(dim);
  s.bbox_upper_ = Vector::Ones(dim);
  return s;
}

ActionSet ActionSet::ball(Vector center, double radius) {
  if (center.size() == 0 || !center.allFinite()) throw Error("ball: bad center");
  if (!(radius > 0.0)) throw Error("ball: radius must be positive");
  ActionSet s;
  s.kind_ = SetKind::EuclideanBall;
  s.dim_ = static_cast<int>(center.size());
  s.radius_ = radius;
  s.bbox_lower_ = center.array() - radius;
  s.bbox_upper_ = center.array() + radius;
  s.center_ = std::move(center);
  return s;
}

ActionSet ActionSet::polytope(Matrix rows, Vector offsets) {
  const int d = static_cast<int>(rows.cols());
  if (d < 1 || rows.rows() != offsets.size() || rows.rows() < 1)
    throw Error("polytope: bad dimensions");
  if (!rows.allFinite() || !offsets.allFinite()) throw Error("polytope: non-finite data");

  ActionSet s;
  s.kind_ = SetKind::HalfspacePolytope;
  s.dim_ = d;
  s.rows_ = std::move(rows);
  s.offsets_ = std::move(offsets);

  // Compactness + non-emptiness: bound every coordinate by LP.
  s.bbox_lower_ = Vector::Zero(d);
  s.bbox_upper_ = Vector::Zero(d);
  for (int j = 0; j < d; ++j) {
    for (int sign : {+1, -1}) {
      LpProblem lp = LpProblem::with_vars(d);
      lp.c = Vector::Zero(d);
      lp.c(j) = sign;  // minimize => sign=+1 gives the lower bound
      lp.A_ub = s.rows_;
      lp.b_ub = s.offsets_;
      LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::Infeasible) throw Error("polytope: empty set");
      if (sol.status == LpStatus::Unbounded)
        throw Error("polytope: unbounded in coordinate " + std::to_string(j) +
                    " (compact set required)");
      if (sign > 0)
        s.bbox_lower_(j) = sol.x(j);
      else
        s.bbox_upper_(j) = sol.x(j);
    }
  }
  return s;
}

bool ActionSet::contains(const Vector& p, double tol) const {
  if (p.size() != dim_) return false;
  switch (kind_) {
    case SetKind::Box:
      return ((p - lower_).minCoeff() >= -tol) && ((upper_ - p).minCoeff() >= -tol);
    case SetKind::Simplex:
      return p.minCoeff() >= -tol && std::abs(p.sum() - 1.0) <= tol;
    case SetKind::EuclideanBall:
      return (p - center_).norm() <= radius_ + tol;
    case SetKind::HalfspacePolytope:
      return (rows_ * p - offsets_).maxCoeff() <= tol;
  }
  return false;
}

Vector ActionSet::interior_point() const {
  switch (kind_) {
    case SetKind::Box:
      return 0.5 * (lower_ + upper_);
    case SetKind::Simplex:
      return Vector::Constant(dim_, 1.0 / dim_);
    case SetKind::EuclideanBall:
      return center_;
    case SetKind::HalfspacePolytope: {
      // Chebyshev-style max-margin point: max s  s.t.  rows*x + s*||row|| <= offsets
      LpProblem lp = LpProblem::with_vars(dim_ + 1);
      lp.c = Vector::Zero(dim_ + 1);
      lp.c(dim_) = -1.0;
      const int m = static_cast<int>(rows_.rows());
      lp.A_ub = Matrix::Zero(m, dim_ + 1);
      lp.A_ub.leftCols(dim_) = rows_;
      for (int r = 0; r < m; ++r) lp.A_ub(r, dim_) = rows_.row(r).norm();
      lp.b_ub = offsets_;
      lp.lb.head(dim_) = bbox_lower_;
      lp.ub.head(dim_) = bbox_upper_;
      lp.lb(dim_) = 0.0;
      lp.ub(dim_) = (bbox_upper_ - bbox_lower_).norm() + 1.0;
      LpSolution sol = solve_lp(lp);
      if (!sol.optimal() || sol.x(dim_) <= 0.0)
        throw Error("polytope: no interior point (empty interior)");
      return sol.x.head(dim_);
    }
  }
  throw Error("interior_point: unknown kind");
}

double ActionSet::support(const Vector& c) const { return c.dot(support_point(c)); }

Vector ActionSet::support_point(const Vector& c) const {
  if (c.size() != dim_) throw Error("support_point: dimension mismatch");
  switch (kind_) {
    case SetKind::Box: {
      Vector x(dim_);
      for (int j = 0; j < dim_; ++j) x(j) = c(j) > 0.0 ? upper_(j) : lower_(j);
      return x;
    }
    case SetKind::Simplex: {
      int best = 0;
      for (int j = 1; j < dim_; ++j)
        if (c(j) > c(best)) best = j;
      Vector x = Vector::Zero(dim_);
      x(best) = 1.0;
      return x;
    }
    case SetKind::EuclideanBall: {
      const double n = c.norm();
      if (n == 0.0) return center_;
      return center_ + (radius_ / n) * c;
    }
    case SetKind::HalfspacePolytope: {
      LpProblem lp = LpProblem::with_vars(dim_);
      lp.c = -c;  // maximize <c, x>
      lp.A_ub = rows_;
      lp.b_ub = offsets_;
      lp.lb = bbox_lower_;
      lp.ub = bbox_upper_;
      LpSolution sol = solve_lp(lp);
      if (!sol.optimal()) throw Error("support_point: polytope LP failed");
      return sol.x;
    }
  }
  throw Error("support_point: unknown kind");
}

Vector ActionSet::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (kind_) {
    case SetKind::Box: {
      Vector x(dim_);
      for (int j = 0; j < dim_; ++j)
        x(j) = lower_(j) + unif(rng) * (upper_(j) - lower_(j));
      return x;
    }
    case SetKind::Simplex: {
      // exponential spacings give the flat Dirichlet
      Vector e(dim_);
      for (int j = 0; j < dim_; ++j) e(j) = -std::log(std::max(unif(rng), 1e-300));
      return e / e.sum();
    }
    case SetKind::EuclideanBall: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vector dir(dim_);
      for (int j = 0; j < dim_; ++j) dir(j) = gauss(rng);
      const double n = dir.norm();
      if (n == 0.0) return center_;
      const double r = radius_ * std::pow(unif(rng), 1.0 / dim_);
      return center_ + (r / n) * dir;
    }
    case SetKind::HalfspacePolytope: {
      // rejection from the bounding box; projection fallback keeps it total
      for (int attempt = 0; attempt < 64; ++attempt) {
        Vector x(dim_);
        for (int j = 0; j < dim_; ++j)
          x(j) = bbox_lower_(j) + unif(rng) * (bbox_upper_(j) - bbox_lower_(j));
        if (contains(x, 1e-12)) return x;
        if (attempt == 63) return project(*this, x);
      }
      return interior_point();
    }
  }
  throw Error("sample: unknown kind");
}

bool ActionSet::vertex_enumerable() const {
  if (kind_ == SetKind::Simplex) return true;
  if (kind_ == SetKind::Box) return dim_ <= 20;
  return false;
}

long ActionSet::vertex_count() const {
  if (kind_ == SetKind::Simplex) return dim_;
  if (kind_ == SetKind::Box) {
    if (dim_ > 20) throw Error("vertex_count: box too large to enumerate");
    return 1L << dim_;
  }
  throw Error("vertex_count: set kind has no vertex enumeration");
}

Vector ActionSet::vertex(long index) const {
  if (kind_ == SetKind::Simplex) {
    Vector x = Vector::Zero(dim_);
    x(static_cast<int>(index)) = 1.0;
    return x;
  }
  if (kind_ == SetKind::Box) {
    Vector x(dim_);
    for (int j = 0; j < dim_; ++j) x(j) = (index >> j) & 1 ? upper_(j) : lower_(j);
    return x;
  }
  throw Error("vertex: set kind has no vertex enumeration");
}

}  // namespace maal
