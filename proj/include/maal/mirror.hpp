#ifndef MAAL_MIRROR_HPP
#define MAAL_MIRROR_HPP

#include <functional>

#include "maal/action_set.hpp"

namespace maal {

enum class RegularizerKind { Euclidean, Entropic };

/// A K-strongly convex penalty on an action set together with its mirror map
/// Phi(y) = argmax_x { <x,y> - psi(x) } and conjugate value psi*(y).
///
/// Euclidean: psi = 0.5*||x||_2^2 on any set kind, K = 1 w.r.t. l2, and the
/// mirror map is the Euclidean projection of y. Entropic: psi = sum x log x
/// on the simplex, K = 1 w.r.t. l1, and the mirror map is the logit choice.
class Regularizer {
 public:
  static Regularizer euclidean(ActionSet domain);
  static Regularizer entropic(int dim);

  RegularizerKind kind() const { return kind_; }
  const ActionSet& domain() const { return domain_; }
  double strong_convexity() const { return modulus_; }

  /// Copy that claims a different modulus. Exists so checkers can be pointed
  /// at a deliberately wrong K and must detect it.
  Regularizer with_claimed_modulus(double k) const;

  double psi(const Vector& x) const;
  Vector mirror(const Vector& y) const;
  double conjugate(const Vector& y) const;

  /// Fenchel coupling F(p,y) = psi(p) + psi*(y) - <p,y>. Throws when p lies
  /// outside the domain beyond 1e-9.
  double fenchel(const Vector& p, const Vector& y) const;

  double primal_norm(const Vector& v) const { return domain_.primal_norm(v); }
  double dual_norm(const Vector& v) const { return domain_.dual_norm(v); }

 private:
  Regularizer(RegularizerKind kind, ActionSet domain, double modulus)
      : kind_(kind), domain_(std::move(domain)), modulus_(modulus) {}
  RegularizerKind kind_;
  ActionSet domain_;
  double modulus_;
};

/// Total coupling F^N(x, Y) = sum_i F_i(x^(i), Y^(i)).
double fenchel_total(const std::vector<Regularizer>& regs, const Profile& x,
                     const Profile& Y);

/// Primal-dual coupling F~((x,lambda),(Y,mu)) = F^N(x,Y) + ||mu - lambda||_2^2 / 2.
double fenchel_primal_dual(const std::vector<Regularizer>& regs, const Profile& x,
                           const Profile& Y, const Vector& lambda,
                           const Vector& mu);

/// KL(p || q); +infinity when p has mass where q has none.
double kl_divergence(const Vector& p, const Vector& q);

/// Both Fenchel-coupling inequalities
///   F(p,y)  >= (K/2) ||Phi(y) - p||^2
///   F(p,y') <= F(p,y) + <y'-y, Phi(y)-p> + (1/2K) ||y'-y||_*^2
/// on random (p, y, y') triples; slack tolerance 1e-8.
DiagnosticReport check_proposition1(const Regularizer& reg, long trials,
                                    std::uint64_t seed,
                                    ExecMode mode = ExecMode::Serial);

/// Sequence of dual points, indexed from 1.
using DualSequence = std::function<Vector(long)>;

/// Verifies that Phi(Y_n) -> p forces F(p, Y_n) -> 0 along the sequence
/// (eventually monotone, final value below 1e-6). Throws when the mirror
/// images do not approach p at all; slow decay is reported, not fatal.
DiagnosticReport check_reverse_convergence(const Regularizer& reg, const Vector& p,
                                           const DualSequence& approach, long count);

/// K-strong-convexity of psi on random triples (x, y, t); tolerance 1e-9.
DiagnosticReport check_strong_convexity(const Regularizer& reg, long trials,
                                        std::uint64_t seed);

/// 1/K-Lipschitz continuity of the mirror map on random dual pairs; 1e-9.
DiagnosticReport check_mirror_lipschitz(const Regularizer& reg, long trials,
                                        std::uint64_t seed);

/// Phi = grad psi* via central finite differences (h = 1e-6, tolerance 1e-4).
DiagnosticReport check_gradient_identity(const Regularizer& reg, long points,
                                         std::uint64_t seed);

}  // namespace maal

#endif  // MAAL_MIRROR_HPP
