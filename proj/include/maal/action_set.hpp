#ifndef MAAL_ACTION_SET_HPP
#define MAAL_ACTION_SET_HPP

#include "maal/common.hpp"

namespace maal {

enum class SetKind { Box, Simplex, EuclideanBall, HalfspacePolytope };

/// A non-empty compact convex action set. Construction validates compactness
/// (finite box bounds, positive ball radius, polytope boundedness via
/// per-coordinate LP bounding) and non-emptiness.
///
/// Each kind carries its natural norm: l1 on the simplex (so the entropic
/// regularizer is 1-strongly convex), l2 everywhere else.
class ActionSet {
 public:
  static ActionSet box(Vector lower, Vector upper);
  static ActionSet simplex(int dim);
  static ActionSet ball(Vector center, double radius);
  static ActionSet polytope(Matrix rows, Vector offsets);  // { x : rows*x <= offsets }

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Matrix& rows() const { return rows_; }
  const Vector& offsets() const { return offsets_; }

  NormKind primal_norm_kind() const {
    return kind_ == SetKind::Simplex ? NormKind::L1 : NormKind::L2;
  }
  NormKind dual_norm_kind() const {
    return kind_ == SetKind::Simplex ? NormKind::Linf : NormKind::L2;
  }
  double primal_norm(const Vector& v) const { return norm_value(v, primal_norm_kind()); }
  double dual_norm(const Vector& v) const { return norm_value(v, dual_norm_kind()); }

  bool contains(const Vector& p, double tol = 1e-9) const;

  /// A point strictly inside (in the relative interior for the simplex).
  Vector interior_point() const;

  /// Support function max_{x in set} <c, x> and a deterministic maximizer.
  double support(const Vector& c) const;
  Vector support_point(const Vector& c) const;

  Vector sample(std::mt19937_64& rng) const;

  bool vertex_enumerable() const;
  long vertex_count() const;            // throws if not enumerable
  Vector vertex(long index) const;      // index < vertex_count()

  // Axis-aligned bounding box (polytope: computed at construction by LP).
  const Vector& bbox_lower() const { return bbox_lower_; }
  const Vector& bbox_upper() const { return bbox_upper_; }

 private:
  ActionSet() = default;

  SetKind kind_ = SetKind::Box;
  int dim_ = 0;
  Vector lower_, upper_;    // box
  Vector center_;           // ball
  double radius_ = 0.0;     // ball
  Matrix rows_;             // polytope
  Vector offsets_;          // polytope
  Vector bbox_lower_, bbox_upper_;
};

}  // namespace maal

#endif  // MAAL_ACTION_SET_HPP
