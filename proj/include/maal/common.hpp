#ifndef MAAL_COMMON_HPP
#define MAAL_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace maal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Action profile stored as one block per player.
using Profile = std::vector<Vector>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whether heavy inner loops run on one thread or under OpenMP. Both paths
/// must produce bit-identical results; the serial path is the reference.
enum class ExecMode { Serial, Parallel };

enum class NormKind { L1, L2, Linf };

double norm_value(const Vector& v, NormKind kind);

/// Outcome of a sampling-based check. `max_violation` is the largest positive
/// slack seen over the tested inequality (<= tolerance means clean).
struct DiagnosticReport {
  bool passed = true;
  long trials = 0;
  long violations = 0;
  double max_violation = 0.0;
  std::vector<std::string> notes;

  void record(double slack, double tolerance) {
    ++trials;
    if (slack > max_violation) max_violation = slack;
    if (slack > tolerance) {
      ++violations;
      passed = false;
    }
  }
};

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Primal-dual reference point (typically an oracle solution).
struct ReferencePoint {
  Profile x;
  Vector lambda;
};

Vector concat_profile(const Profile& x);
Profile split_profile(const Vector& flat, const std::vector<int>& dims);

inline bool is_finite(const Vector& v) { return v.allFinite(); }

std::string format_double(double v);  // 17 significant digits, replay-exact

}  // namespace maal

#endif  // MAAL_COMMON_HPP
