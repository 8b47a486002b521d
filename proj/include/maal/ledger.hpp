#ifndef MAAL_LEDGER_HPP
#define MAAL_LEDGER_HPP

#include "maal/common.hpp"

namespace maal {

/// Strided trajectory record. Dual states are kept alongside the primal ones
/// so Fenchel quantities can be reconstructed exactly at every recorded t.
struct Trajectory {
  struct Point {
    long t = 0;
    Vector x_flat;
    Vector lambda;
    double gamma = 0.0;
    double theta = 0.0;
    Vector y_flat;
  };
  std::vector<int> dims;
  int constraint_rows = 0;
  std::vector<Point> points;

  const Point& final_point() const {
    if (points.empty()) throw Error("trajectory: empty");
    return points.back();
  }
};

/// Raw per-step record of everything the summed convergence bound needs:
/// (X_t, lambda_t, gamma_t, theta_t) for every step, plus strided dual
/// snapshots (Y_t, lambda_t) at which the left side can be evaluated.
class BoundLedger {
 public:
  BoundLedger() = default;
  BoundLedger(std::vector<int> dims, int constraint_rows)
      : dims_(std::move(dims)), m_(constraint_rows) {
    total_ = 0;
    for (int d : dims_) total_ += d;
  }

  void reserve(long steps) {
    gamma_.reserve(static_cast<size_t>(steps));
    theta_.reserve(static_cast<size_t>(steps));
    x_.reserve(static_cast<size_t>(steps) * static_cast<size_t>(total_));
    lam_.reserve(static_cast<size_t>(steps) * static_cast<size_t>(m_));
  }

  void append_step(const Vector& x_flat, const Vector& lambda, double gamma,
                   double theta) {
    if (x_flat.size() != total_ || lambda.size() != m_)
      throw Error("ledger: step dimension mismatch");
    gamma_.push_back(gamma);
    theta_.push_back(theta);
    x_.insert(x_.end(), x_flat.data(), x_flat.data() + total_);
    lam_.insert(lam_.end(), lambda.data(), lambda.data() + m_);
  }

  void add_snapshot(long t, const Profile& y, const Vector& lambda) {
    snapshots_.push_back(Snapshot{t, y, lambda});
  }

  long steps() const { return static_cast<long>(gamma_.size()); }
  bool empty() const { return steps() == 0; }
  int total_dim() const { return total_; }
  int constraint_rows() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }

  double gamma(long t) const { return gamma_[static_cast<size_t>(t)]; }
  double theta(long t) const { return theta_[static_cast<size_t>(t)]; }
  Eigen::Map<const Vector> x_at(long t) const {
    return {x_.data() + static_cast<size_t>(t) * static_cast<size_t>(total_),
            total_};
  }
  Eigen::Map<const Vector> lambda_at(long t) const {
    return {lam_.data() + static_cast<size_t>(t) * static_cast<size_t>(m_), m_};
  }

  struct Snapshot {
    long t = 0;
    Profile y;
    Vector lambda;
  };
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }

 private:
  std::vector<int> dims_;
  int m_ = 0;
  int total_ = 0;
  std::vector<double> gamma_, theta_;
  std::vector<double> x_, lam_;
  std::vector<Snapshot> snapshots_;
};

}  // namespace maal

#endif  // MAAL_LEDGER_HPP
