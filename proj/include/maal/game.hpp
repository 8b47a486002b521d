#ifndef MAAL_GAME_HPP
#define MAAL_GAME_HPP

#include <functional>
#include <optional>

#include "maal/action_set.hpp"

namespace maal {

/// Gradient oracle v_i(x): full profile -> D_i-vector of partial gradients of
/// u_i w.r.t. the player's own block. Must be pure: same profile, same value.
using GradientOracle = std::function<Vector(const Profile&)>;

/// Optional scalar utility oracle, used by diagnostics only.
using UtilityOracle = std::function<double(const Profile&)>;

struct PlayerSpec {
  int id = 0;
  ActionSet action_set;
  GradientOracle gradient;
  UtilityOracle utility;  // may be null

  PlayerSpec(int id, ActionSet set, GradientOracle grad, UtilityOracle util = nullptr)
      : id(id), action_set(std::move(set)), gradient(std::move(grad)),
        utility(std::move(util)) {}
};

/// Coupling constraint A x <= b with A stored as per-player column blocks.
class AffineConstraint {
 public:
  AffineConstraint(Matrix a, Vector b, std::vector<int> block_dims);

  int num_rows() const { return static_cast<int>(b_.size()); }
  int total_dim() const { return static_cast<int>(a_.cols()); }
  int num_blocks() const { return static_cast<int>(dims_.size()); }
  int block_dim(int i) const { return dims_[static_cast<size_t>(i)]; }
  int block_offset(int i) const { return offsets_[static_cast<size_t>(i)]; }

  const Matrix& matrix() const { return a_; }
  const Vector& rhs() const { return b_; }

  /// The player-facing view: exactly the columns belonging to player i.
  Eigen::Ref<const Matrix> block(int i) const {
    return a_.middleCols(block_offset(i), block_dim(i));
  }

  /// A x - b for a flat profile.
  Vector slack_violation(const Vector& x_flat) const { return a_ * x_flat - b_; }
  Vector apply(const Profile& x) const;  // A x - b

 private:
  Matrix a_;
  Vector b_;
  std::vector<int> dims_;
  std::vector<int> offsets_;
};

/// N-player concave game with a shared affine coupling constraint.
/// Construction validates block dimensions, gradient output sizes (spot
/// check) and non-emptiness of the feasible set Q = { x in X : Ax <= b }.
class Game {
 public:
  Game(std::vector<PlayerSpec> players, AffineConstraint constraint);

  int num_players() const { return static_cast<int>(players_.size()); }
  const PlayerSpec& player(int i) const { return players_[static_cast<size_t>(i)]; }
  const AffineConstraint& constraint() const { return constraint_; }
  int total_dim() const { return constraint_.total_dim(); }
  const std::vector<int>& dims() const { return dims_; }

  /// All gradient values at the profile, validated for size and finiteness.
  Profile gradients(const Profile& x) const;
  Vector gradients_flat(const Profile& x) const { return concat_profile(gradients(x)); }

  bool all_polyhedral() const;
  bool has_utilities() const;
  Profile sample_profile(std::mt19937_64& rng) const;
  Profile interior_profile() const;

 private:
  std::vector<PlayerSpec> players_;
  AffineConstraint constraint_;
  std::vector<int> dims_;
};

/// Bound constants of the convergence analysis:
///   ||v(x)||_* <= C1,  ||A^T lambda||_* <= C2 ||lambda||_2,  ||Ax||_2 <= C3
/// with the population dual norm = max over per-player dual block norms, and
/// K the aggregate (minimum) strong-convexity modulus.
struct GameConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double k = 1.0;

  double ctilde1() const { return c1 * c1 / (2.0 * k) + 2.0 * c3 * c3; }
  double ctilde2() const { return c2 * c2 / (2.0 * k); }
  void validate() const;
};

/// C2 exactly (power iteration for l2-dual blocks, column-norm maximum for
/// linf-dual blocks); C3 exactly by vertex enumeration when every action set
/// enumerates, otherwise sampled and inflated by 1.25; C1 by sampled
/// maximization inflated by 1.25 unless an analytic override is given.
GameConstants estimate_constants(const Game& game, long samples, std::uint64_t seed,
                                 double modulus = 1.0,
                                 std::optional<double> c1_override = std::nullopt);

struct SlaterCertificate {
  bool holds = false;
  Vector point;       // flat profile, strictly feasible when holds
  double margin = 0;  // min componentwise slack b - A x at the certificate
  std::string note;
};

/// Searches for a strictly feasible point in the relative interior of X by
/// maximizing the joint margin (LP when every set is polyhedral, projected
/// supergradient ascent otherwise). Refutation is a valid return, not an error.
SlaterCertificate check_slater(const Game& game);

/// Spot check of the monotone-gradient inequality
///   <x1 - x2, v_i(x1, x_-i) - v_i(x2, x_-i)> <= 0
/// on sampled pairs. Violations are listed, never fatal.
DiagnosticReport check_concavity(const Game& game, int player, long profile_samples,
                                 std::uint64_t seed);

struct LpProblem;

/// LP skeleton over Q = { x in X : Ax <= b } for polyhedral games: variable
/// bounds, simplex equality rows, polytope rows and the coupling rows, with a
/// zero objective for the caller to fill in.
LpProblem feasible_region_lp(const Game& game);

}  // namespace maal

#endif  // MAAL_GAME_HPP
