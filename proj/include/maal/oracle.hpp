#ifndef MAAL_ORACLE_HPP
#define MAAL_ORACLE_HPP

#include "maal/game.hpp"

namespace maal {

/// Verified primal-dual solution. Accepted solutions carry residuals at or
/// below the solver's acceptance threshold.
struct KktSolution {
  Profile x;
  Vector lambda;
  double stationarity = 0.0;    // natural-map gap of the price-adjusted gradients
  double complementarity = 0.0; // max_m | lambda_m * (b - Ax)_m |
  double feasibility = 0.0;     // coupling violation plus set distance

  double max_residual() const {
    return std::max({stationarity, complementarity, feasibility});
  }
};

void fill_residuals(const Game& game, KktSolution& sol);

/// Affine gradient model v(x) = P x + q, extracted by probing the oracles and
/// verified on random profiles (rejects non-affine games).
struct AffineModel {
  Matrix p;
  Vector q;
};
AffineModel extract_affine_gradient(const Game& game, std::uint64_t seed = 1234);

/// Ground truth for linear-quadratic games on boxes: enumerates box-face /
/// active-row combinations of the mixed complementarity system and returns
/// the verified solution (all residuals <= 1e-9). Dimension cap: total
/// dimension + coupling rows <= 10.
KktSolution solve_lq_kkt(const Game& game);

/// Baseline from a different algorithm family: extragradient on the extended
/// operator over X x [0, cap]^M with step 1/L (L sampled, inflated by 1.25).
/// Accepts only iterates with all residuals <= 1e-6; throws when the price
/// iterate touches the cap (callers re-solve with a doubled cap).
KktSolution solve_extragradient(const Game& game, double lambda_cap, long iterations);

/// Cap-and-double wrapper around solve_extragradient.
KktSolution solve_extragradient_auto(const Game& game, long iterations = 200000,
                                     int max_doublings = 8);

class CapHitError : public Error {
 public:
  CapHitError(std::string msg, double cap) : Error(std::move(msg)), cap(cap) {}
  double cap;
};

}  // namespace maal

#endif  // MAAL_ORACLE_HPP
