#include "maal/common.hpp"

#include <cstdio>

namespace maal {

double norm_value(const Vector& v, NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return v.lpNorm<1>();
    case NormKind::L2:
      return v.norm();
    case NormKind::Linf:
      return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  throw Error("unknown norm kind");
}

Vector concat_profile(const Profile& x) {
  Eigen::Index total = 0;
  for (const auto& block : x) total += block.size();
  Vector out(total);
  Eigen::Index at = 0;
  for (const auto& block : x) {
    out.segment(at, block.size()) = block;
    at += block.size();
  }
  return out;
}

Profile split_profile(const Vector& flat, const std::vector<int>& dims) {
  Eigen::Index total = 0;
  for (int d : dims) total += d;
  if (total != flat.size()) throw Error("split_profile: dimension mismatch");
  Profile out;
  out.reserve(dims.size());
  Eigen::Index at = 0;
  for (int d : dims) {
    out.push_back(flat.segment(at, d));
    at += d;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace maal
