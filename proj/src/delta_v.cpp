#include "ltmpc/delta_v.hpp"

namespace ltmpc {

DvPrime delta_v_prime(const ClassicalEquinoctial& current, const ClassicalEquinoctial& target, double mu) {
  const double a = current.a;
  const double f = current.f;
  const double g = current.g;
  const double e = std::hypot(f, g);
  const double p = a * (1.0 - e * e);
  const double s2 = 1.0 + current.h * current.h + current.k * current.k;
  const double vp = std::sqrt(mu / p) * 1e3;

  DvPrime out;
  out.components[0] = (target.a - a) / (2.0 * a) * std::sqrt(mu / a) * 1e3 * std::sqrt((1.0 - e) / (1.0 + e));
  out.components[1] = 2.0 * (target.h - current.h) * vp * (std::sqrt(1.0 - g * g) + f) / s2;
  out.components[2] = 2.0 * (target.k - current.k) * vp * (std::sqrt(1.0 - f * f) + f) / s2;
  out.magnitude = out.components.norm();
  return out;
}

ClassicalEquinoctial resolve_target(const TargetElements& target, const ClassicalEquinoctial& current) {
  ClassicalEquinoctial t = current;
  t.a = target.a;
  t.f = 0.0;
  t.g = 0.0;
  const double tan_half_cur = std::hypot(current.h, current.k);
  const double raan_cur = std::atan2(current.k, current.h);
  const double tan_half = target.i ? std::tan(0.5 * *target.i) : tan_half_cur;
  const double raan = target.raan ? *target.raan : raan_cur;
  if (target.i || target.raan) {
    t.h = tan_half * std::cos(raan);
    t.k = tan_half * std::sin(raan);
  }
  return t;
}

}  // namespace ltmpc
