#include "maal/mirror.hpp"

#include <cmath>
#include <limits>

#include "maal/geometry.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double entropy_sum(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double v = x(j);
    if (v > 0.0) s += v * std::log(v);
    // 0 log 0 = 0 by convention
  }
  return s;
}

double log_sum_exp(const Vector& y) {
  const double m = y.maxCoeff();
  double s = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) s += std::exp(y(j) - m);
  return m + std::log(s);
}

Vector softmax(const Vector& y) {
  const double m = y.maxCoeff();
  Vector e = (y.array() - m).exp().matrix();
  return e / e.sum();
}

// Evaluate f(i) for i in [0,n); parallel path must match the serial one
// bit-for-bit, so results land in a plain array and reductions stay serial.
template <typename F>
std::vector<double> map_indexed(long n, ExecMode mode, F&& f) {
  std::vector<double> out(static_cast<size_t>(n));
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = f(i);
  } else {
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = f(i);
  }
  return out;
}

}  // namespace

Regularizer Regularizer::euclidean(ActionSet domain) {
  return Regularizer(RegularizerKind::Euclidean, std::move(domain), 1.0);
}

Regularizer Regularizer::entropic(int dim) {
  return Regularizer(RegularizerKind::Entropic, ActionSet::simplex(dim), 1.0);
}

Regularizer Regularizer::with_claimed_modulus(double k) const {
  if (!(k > 0.0)) throw Error("regularizer: modulus must be positive");
  Regularizer r = *this;
  r.modulus_ = k;
  return r;
}

double Regularizer::psi(const Vector& x) const {
  if (x.size() != domain_.dim()) throw Error("psi: dimension mismatch");
  if (kind_ == RegularizerKind::Euclidean) return 0.5 * x.squaredNorm();
  return entropy_sum(x);
}

Vector Regularizer::mirror(const Vector& y) const {
  if (y.size() != domain_.dim()) throw Error("mirror: dimension mismatch");
  if (kind_ == RegularizerKind::Euclidean) return project(domain_, y);
  return softmax(y);
}

double Regularizer::conjugate(const Vector& y) const {
  if (y.size() != domain_.dim()) throw Error("conjugate: dimension mismatch");
  if (kind_ == RegularizerKind::Entropic) return log_sum_exp(y);
  // psi*(y) = <Phi(y), y> - psi(Phi(y)), exact at the computed argmax
  const Vector x = mirror(y);
  return x.dot(y) - psi(x);
}

double Regularizer::fenchel(const Vector& p, const Vector& y) const {
  if (!domain_.contains(p, 1e-9))
    throw Error("fenchel: primal point outside the regularizer domain");
  return psi(p) + conjugate(y) - p.dot(y);
}

double fenchel_total(const std::vector<Regularizer>& regs, const Profile& x,
                     const Profile& Y) {
  if (regs.size() != x.size() || regs.size() != Y.size())
    throw Error("fenchel_total: player count mismatch");
  double s = 0.0;
  for (size_t i = 0; i < regs.size(); ++i) s += regs[i].fenchel(x[i], Y[i]);
  return s;
}

double fenchel_primal_dual(const std::vector<Regularizer>& regs, const Profile& x,
                           const Profile& Y, const Vector& lambda, const Vector& mu) {
  return fenchel_total(regs, x, Y) + 0.5 * (mu - lambda).squaredNorm();
}

double kl_divergence(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw Error("kl_divergence: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) <= 0.0) continue;
    if (q(j) <= 0.0) return kInf;
    s += p(j) * std::log(p(j) / q(j));
  }
  return s;
}

DiagnosticReport check_proposition1(const Regularizer& reg, long trials,
                                    std::uint64_t seed, ExecMode mode) {
  if (trials < 1) throw Error("check_proposition1: trials must be >= 1");
  constexpr double kTol = 1e-8;
  const int d = reg.domain().dim();
  const double k = reg.strong_convexity();

  // deterministic triple generation, then data-parallel evaluation
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scales[3] = {0.5, 2.0, 8.0};
  std::vector<Vector> ps, ys, yps;
  ps.reserve(static_cast<size_t>(trials));
  ys.reserve(static_cast<size_t>(trials));
  yps.reserve(static_cast<size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    const double sc = scales[t % 3];
    ps.push_back(reg.domain().sample(rng));
    Vector y(d), yp(d);
    for (int j = 0; j < d; ++j) y(j) = sc * gauss(rng);
    for (int j = 0; j < d; ++j) yp(j) = sc * gauss(rng);
    ys.push_back(std::move(y));
    yps.push_back(std::move(yp));
  }

  std::vector<double> slack = map_indexed(trials, mode, [&](long t) {
    const auto& p = ps[static_cast<size_t>(t)];
    const auto& y = ys[static_cast<size_t>(t)];
    const auto& yp = yps[static_cast<size_t>(t)];
    const Vector img = reg.mirror(y);
    const double f = reg.fenchel(p, y);
    const double diff = reg.primal_norm(img - p);
    const double s1 = 0.5 * k * diff * diff - f;  // item 1
    const Vector dy = yp - y;
    const double dual = reg.dual_norm(dy);
    const double rhs = f + dy.dot(img - p) + dual * dual / (2.0 * k);
    const double s2 = reg.fenchel(p, yp) - rhs;  // item 2
    return std::max(s1, s2);
  });

  DiagnosticReport rep;
  for (double s : slack) rep.record(s, kTol);
  if (!rep.passed)
    rep.notes.push_back("Fenchel coupling inequality violated: claimed modulus K=" +
                        std::to_string(k) + " is too large for this regularizer");
  return rep;
}

DiagnosticReport check_reverse_convergence(const Regularizer& reg, const Vector& p,
                                           const DualSequence& approach, long count) {
  if (count < 8) throw Error("check_reverse_convergence: need at least 8 points");
  if (!reg.domain().contains(p, 1e-9))
    throw Error("check_reverse_convergence: p outside the domain");
  constexpr double kTol = 1e-6;

  std::vector<double> dist(static_cast<size_t>(count));
  std::vector<double> fval(static_cast<size_t>(count));
  for (long n = 1; n <= count; ++n) {
    const Vector y = approach(n);
    const Vector img = reg.mirror(y);
    dist[static_cast<size_t>(n - 1)] = reg.primal_norm(img - p);
    fval[static_cast<size_t>(n - 1)] = reg.fenchel(p, y);
  }

  const double d0 = dist.front();
  const double dN = dist.back();
  if (!(dN <= std::max(1e-6, 0.05 * d0)))
    throw Error("check_reverse_convergence: mirror images do not converge to p "
                "(initial distance " + std::to_string(d0) + ", final " +
                std::to_string(dN) + ")");

  // largest suffix on which F is non-increasing
  long mono_from = count - 1;
  for (long n = count - 2; n >= 0; --n) {
    if (fval[static_cast<size_t>(n)] >= fval[static_cast<size_t>(n + 1)] - 1e-12)
      mono_from = n;
    else
      break;
  }

  DiagnosticReport rep;
  rep.trials = count;
  rep.max_violation = fval.back();
  const bool eventually_monotone = mono_from <= count / 2;
  rep.passed = eventually_monotone && fval.back() <= kTol;
  if (!rep.passed) {
    // decay-rate fit on the tail: F ~ C * n^(-alpha)
    const long half = count / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (long n = half; n < count; ++n) {
      const double f = fval[static_cast<size_t>(n)];
      if (f <= 0.0) continue;
      const double lx = std::log(static_cast<double>(n + 1));
      const double ly = std::log(f);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++m;
    }
    if (m >= 2) {
      const double alpha = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
      rep.notes.push_back("slow decay: F(p,Y_n) ~ n^(-" + std::to_string(alpha) +
                          "), final value " + std::to_string(fval.back()));
    } else {
      rep.notes.push_back("F did not settle below tolerance");
    }
    rep.violations = 1;
  }
  return rep;
}

DiagnosticReport check_strong_convexity(const Regularizer& reg, long trials,
                                        std::uint64_t seed) {
  constexpr double kTol = 1e-9;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double k = reg.strong_convexity();
  DiagnosticReport rep;
  for (long t = 0; t < trials; ++t) {
    const Vector x = reg.domain().sample(rng);
    const Vector y = reg.domain().sample(rng);
    const double lam = unif(rng);
    const Vector mid = lam * x + (1.0 - lam) * y;
    const double n = reg.primal_norm(x - y);
    const double lhs = reg.psi(mid);
    const double rhs =
        lam * reg.psi(x) + (1.0 - lam) * reg.psi(y) - 0.5 * k * lam * (1.0 - lam) * n * n;
    rep.record(lhs - rhs, kTol);
  }
  return rep;
}

DiagnosticReport check_mirror_lipschitz(const Regularizer& reg, long trials,
                                        std::uint64_t seed) {
  constexpr double kTol = 1e-9;
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = reg.domain().dim();
  const double k = reg.strong_convexity();
  const double scales[3] = {0.5, 2.0, 8.0};
  DiagnosticReport rep;
  for (long t = 0; t < trials; ++t) {
    const double sc = scales[t % 3];
    Vector y(d), yp(d);
    for (int j = 0; j < d; ++j) y(j) = sc * gauss(rng);
    for (int j = 0; j < d; ++j) yp(j) = sc * gauss(rng);
    const double lhs = reg.primal_norm(reg.mirror(y) - reg.mirror(yp));
    const double rhs = reg.dual_norm(y - yp) / k;
    rep.record(lhs - rhs, kTol);
  }
  return rep;
}

DiagnosticReport check_gradient_identity(const Regularizer& reg, long points,
                                         std::uint64_t seed) {
  constexpr double kH = 1e-6;
  constexpr double kTol = 1e-4;
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = reg.domain().dim();
  DiagnosticReport rep;
  for (long t = 0; t < points; ++t) {
    Vector y(d);
    for (int j = 0; j < d; ++j) y(j) = 2.0 * gauss(rng);
    const Vector img = reg.mirror(y);
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
      Vector yp = y, ym = y;
      yp(j) += kH;
      ym(j) -= kH;
      const double fd = (reg.conjugate(yp) - reg.conjugate(ym)) / (2.0 * kH);
      worst = std::max(worst, std::abs(fd - img(j)));
    }
    rep.record(worst, kTol);
  }
  return rep;
}

}  // namespace maal
