#ifndef MAAL_SCHEDULE_HPP
#define MAAL_SCHEDULE_HPP

#include <functional>

#include "maal/game.hpp"

namespace maal {

enum class ScheduleFamily { Harmonic, Power, Custom };

/// Paired step-size sequence gamma_t and augmentation sequence theta_t.
///   harmonic: gamma_t = gamma0 / (t+1)
///   power:    gamma_t = gamma0 / (t+1)^exponent   (exponent in [0,1])
/// with theta_t = delta * gamma_t for both closed-form families. Custom
/// schedules provide callables and can only be certified numerically.
struct Schedule {
  ScheduleFamily family = ScheduleFamily::Harmonic;
  double gamma0 = 1.0;
  double exponent = 1.0;  // power family only
  double delta = 0.0;     // theta_t = delta * gamma_t

  std::function<double(long)> custom_gamma;
  std::function<double(long)> custom_theta;

  static Schedule harmonic(double gamma0, double delta);
  static Schedule power(double gamma0, double exponent, double delta);
  static Schedule custom(std::function<double(long)> gamma,
                         std::function<double(long)> theta);

  double gamma(long t) const;
  double theta(long t) const;
};

struct ConditionCheck {
  std::string name;
  bool pass = false;
  std::string detail;
  long witness_t = -1;  // index exhibiting a failure, when applicable
};

/// Validity certificate for the convergence-theorem step-size conditions:
///   (divergence)       sum gamma_t = infinity
///   (ratio_gamma_sq)   (sum gamma_t^2) / (sum gamma_t) -> 0
///   (ratio_gamma_theta)(sum gamma_t theta_t) / (sum gamma_t) -> 0
///   (pointwise)        gamma_t (2 theta_t^2 + Ctilde2) - theta_t/2 <= 0  eventually
/// `t0` is the first index from which the pointwise inequality holds onward.
struct ScheduleCertificate {
  bool valid = false;
  bool numeric_only = false;
  long t0 = -1;
  std::vector<ConditionCheck> conditions;

  const ConditionCheck* failing() const {
    for (const auto& c : conditions)
      if (!c.pass) return &c;
    return nullptr;
  }
};

/// Closed-form families are certified analytically and the pointwise condition
/// is additionally scanned exactly for all t <= horizon_check; custom
/// schedules get numeric checks only.
ScheduleCertificate validate_schedule(const Schedule& schedule,
                                      const GameConstants& constants,
                                      long horizon_check);

}  // namespace maal

#endif  // MAAL_SCHEDULE_HPP
