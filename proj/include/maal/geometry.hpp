#ifndef MAAL_GEOMETRY_HPP
#define MAAL_GEOMETRY_HPP

#include "maal/action_set.hpp"

namespace maal {

/// Euclidean projection onto an action set. Box, ball and simplex are closed
/// form; halfspace polytopes use Dykstra's alternating projections to 1e-10
/// (at most 1e4 sweeps).
Vector project(const ActionSet& target, const Vector& point);

/// Projection onto the nonnegative orthant (the price-vector domain).
Vector project_nonneg(const Vector& point);

Vector project_box(const Vector& lower, const Vector& upper, const Vector& p);
Vector project_ball(const Vector& center, double radius, const Vector& p);
Vector project_simplex(const Vector& p);

/// Thrown when Dykstra does not reach tolerance within the sweep budget.
class DykstraError : public Error {
 public:
  DykstraError(std::string msg, Vector last, double residual)
      : Error(std::move(msg)), last_iterate(std::move(last)), residual(residual) {}
  Vector last_iterate;
  double residual;
};

}  // namespace maal

#endif  // MAAL_GEOMETRY_HPP
