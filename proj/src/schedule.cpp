#include "maal/schedule.hpp"

#include <cmath>

namespace maal {

Schedule Schedule::harmonic(double gamma0, double delta) {
  if (!(gamma0 > 0.0)) throw Error("schedule: gamma0 must be positive");
  if (delta < 0.0) throw Error("schedule: delta must be nonnegative");
  Schedule s;
  s.family = ScheduleFamily::Harmonic;
  s.gamma0 = gamma0;
  s.exponent = 1.0;
  s.delta = delta;
  return s;
}

Schedule Schedule::power(double gamma0, double exponent, double delta) {
  if (!(gamma0 > 0.0)) throw Error("schedule: gamma0 must be positive");
  if (exponent < 0.0 || exponent > 1.0)
    throw Error("schedule: exponent must lie in [0, 1]");
  if (delta < 0.0) throw Error("schedule: delta must be nonnegative");
  Schedule s;
  s.family = ScheduleFamily::Power;
  s.gamma0 = gamma0;
  s.exponent = exponent;
  s.delta = delta;
  return s;
}

Schedule Schedule::custom(std::function<double(long)> gamma,
                          std::function<double(long)> theta) {
  if (!gamma || !theta) throw Error("schedule: custom callables required");
  Schedule s;
  s.family = ScheduleFamily::Custom;
  s.custom_gamma = std::move(gamma);
  s.custom_theta = std::move(theta);
  return s;
}

double Schedule::gamma(long t) const {
  double g;
  switch (family) {
    case ScheduleFamily::Harmonic:
      g = gamma0 / static_cast<double>(t + 1);
      break;
    case ScheduleFamily::Power:
      g = gamma0 / std::pow(static_cast<double>(t + 1), exponent);
      break;
    case ScheduleFamily::Custom:
      g = custom_gamma(t);
      break;
    default:
      throw Error("schedule: unknown family");
  }
  if (!(g > 0.0)) throw Error("schedule: gamma_t must be positive (t=" +
                              std::to_string(t) + ")");
  return g;
}

double Schedule::theta(long t) const {
  double th;
  if (family == ScheduleFamily::Custom)
    th = custom_theta(t);
  else
    th = delta * gamma(t);
  if (th < 0.0) throw Error("schedule: theta_t must be nonnegative (t=" +
                            std::to_string(t) + ")");
  return th;
}

namespace {

double pointwise_term(const Schedule& s, double ctilde2, long t) {
  const double g = s.gamma(t);
  const double th = s.theta(t);
  return g * (2.0 * th * th + ctilde2) - 0.5 * th;
}

// exact suffix scan: first index from which the pointwise inequality holds
// through horizon (or -1 when it fails at the horizon itself)
long scan_t0(const Schedule& s, double ctilde2, long horizon) {
  long t0 = -1;
  for (long t = horizon; t >= 0; --t) {
    if (pointwise_term(s, ctilde2, t) <= 1e-15)
      t0 = t;
    else
      break;
  }
  return t0;
}

// numeric trend proxy for ratio -> 0 conditions: the ratio must decrease
// across a geometric checkpoint grid (or already be negligible)
ConditionCheck numeric_ratio_check(const std::string& name, const Schedule& s,
                                   bool with_theta, long horizon) {
  ConditionCheck c;
  c.name = name;
  double sum_g = 0.0, sum_num = 0.0;
  std::vector<double> ratios;
  const long checkpoints[4] = {horizon / 8, horizon / 4, horizon / 2, horizon};
  long next = 0;
  for (long t = 0; t <= horizon; ++t) {
    const double g = s.gamma(t);
    sum_g += g;
    sum_num += with_theta ? g * s.theta(t) : g * g;
    if (next < 4 && t == checkpoints[next]) {
      ratios.push_back(sum_num / sum_g);
      ++next;
    }
  }
  bool decreasing = true;
  for (size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] >= ratios[i - 1] - 1e-15) decreasing = false;
  const double final_ratio = ratios.empty() ? 0.0 : ratios.back();
  c.pass = decreasing || final_ratio <= 1e-12;
  c.detail = "numeric trend over checkpoints; final ratio " + std::to_string(final_ratio);
  if (!c.pass) c.witness_t = horizon;
  return c;
}

}  // namespace

ScheduleCertificate validate_schedule(const Schedule& schedule,
                                      const GameConstants& constants,
                                      long horizon_check) {
  constants.validate();
  if (horizon_check < 8) throw Error("validate_schedule: horizon_check too small");
  const double ct2 = constants.ctilde2();

  ScheduleCertificate cert;
  cert.numeric_only = schedule.family == ScheduleFamily::Custom;

  if (schedule.family == ScheduleFamily::Custom) {
    // divergence proxy: successive tail blocks of a divergent series keep
    // their mass (harmonic: ratio 1), convergent tails shrink geometrically
    ConditionCheck div;
    div.name = "divergence";
    double tail1 = 0.0, tail2 = 0.0;
    for (long t = horizon_check / 4 + 1; t <= horizon_check / 2; ++t)
      tail1 += schedule.gamma(t);
    for (long t = horizon_check / 2 + 1; t <= horizon_check; ++t)
      tail2 += schedule.gamma(t);
    div.pass = tail1 > 0.0 && tail2 >= 0.75 * tail1;
    div.detail = "numeric tail-block ratio " +
                 std::to_string(tail1 > 0.0 ? tail2 / tail1 : 0.0);
    if (!div.pass) div.witness_t = horizon_check;
    cert.conditions.push_back(div);

    cert.conditions.push_back(
        numeric_ratio_check("ratio_gamma_sq", schedule, false, horizon_check));
    cert.conditions.push_back(
        numeric_ratio_check("ratio_gamma_theta", schedule, true, horizon_check));

    ConditionCheck pw;
    pw.name = "pointwise";
    const long t0 = scan_t0(schedule, ct2, horizon_check);
    pw.pass = t0 >= 0;
    pw.detail = pw.pass ? "holds from t0=" + std::to_string(t0) + " through horizon"
                        : "positive at the checked horizon";
    if (!pw.pass) pw.witness_t = horizon_check;
    cert.t0 = t0;
    cert.conditions.push_back(pw);
  } else {
    const bool constant_gamma =
        schedule.family == ScheduleFamily::Power && schedule.exponent == 0.0;

    ConditionCheck div;
    div.name = "divergence";
    div.pass = true;  // exponent <= 1 by construction
    div.detail = "sum gamma_t diverges (exponent <= 1)";
    cert.conditions.push_back(div);

    ConditionCheck rsq;
    rsq.name = "ratio_gamma_sq";
    if (constant_gamma) {
      rsq.pass = false;
      rsq.detail = "constant step size: ratio tends to gamma0 = " +
                   std::to_string(schedule.gamma0);
      rsq.witness_t = horizon_check;
    } else {
      rsq.pass = true;
      rsq.detail = "ratio decays like t^(-exponent)";
    }
    cert.conditions.push_back(rsq);

    ConditionCheck rth;
    rth.name = "ratio_gamma_theta";
    // theta = delta * gamma, so this ratio is delta times the previous one
    if (schedule.delta == 0.0) {
      rth.pass = true;
      rth.detail = "theta identically zero";
    } else if (constant_gamma) {
      rth.pass = false;
      rth.detail = "constant step size: ratio tends to delta*gamma0";
      rth.witness_t = horizon_check;
    } else {
      rth.pass = true;
      rth.detail = "delta-scaled copy of ratio_gamma_sq";
    }
    cert.conditions.push_back(rth);

    ConditionCheck pw;
    pw.name = "pointwise";
    const double delta = schedule.delta;
    if (delta <= 2.0 * ct2) {
      pw.pass = false;
      pw.detail = "requires delta > 2*Ctilde2 (delta=" + std::to_string(delta) +
                  ", 2*Ctilde2=" + std::to_string(2.0 * ct2) + ")";
      pw.witness_t = horizon_check;  // term is positive for every t
      cert.t0 = -1;
    } else {
      // gamma_t (2 delta^2 gamma_t^2 + Ctilde2 - delta/2) <= 0 once
      // gamma_t <= gamma_star
      const double gamma_star = std::sqrt((0.5 * delta - ct2) / (2.0 * delta * delta));
      long t0_analytic = 0;
      if (schedule.gamma0 > gamma_star) {
        if (constant_gamma) {
          pw.pass = false;
          pw.detail = "constant gamma0 exceeds the admissible level " +
                      std::to_string(gamma_star);
          pw.witness_t = horizon_check;
          cert.t0 = -1;
          cert.conditions.push_back(pw);
          cert.valid = false;
          return cert;
        }
        const double ratio = schedule.gamma0 / gamma_star;
        t0_analytic = static_cast<long>(
            std::ceil(std::pow(ratio, 1.0 / schedule.exponent))) - 1;
      }
      pw.pass = true;
      pw.detail = "holds for all t >= " + std::to_string(t0_analytic) +
                  " (gamma threshold " + std::to_string(gamma_star) + ")";
      cert.t0 = t0_analytic;
      // exact confirmation over the requested horizon
      for (long t = std::min(t0_analytic, horizon_check); t <= horizon_check; ++t) {
        if (t >= t0_analytic && pointwise_term(schedule, ct2, t) > 1e-15) {
          pw.pass = false;
          pw.detail = "analytic t0 contradicted at t=" + std::to_string(t);
          pw.witness_t = t;
          cert.t0 = -1;
          break;
        }
      }
    }
    cert.conditions.push_back(pw);
  }

  cert.valid = true;
  for (const auto& c : cert.conditions) cert.valid = cert.valid && c.pass;
  return cert;
}

}  // namespace maal
