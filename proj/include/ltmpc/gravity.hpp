#pragma once

#include "ltmpc/constants.hpp"
#include "ltmpc/elements.hpp"

namespace ltmpc {

template <typename Scalar>
Vector3T<Scalar> two_body_acceleration(const Vector3T<Scalar>& r, double mu) {
  using std::sqrt;
  const Scalar r2 = r.dot(r);
  const Scalar r3 = r2 * sqrt(r2);
  return -Scalar(mu) * r / r3;
}

template <typename Scalar>
Vector3T<Scalar> j2_acceleration(const Vector3T<Scalar>& r, const Gravity& grav) {
  using std::sqrt;
  const Scalar r2 = r.dot(r);
  const Scalar rn = sqrt(r2);
  const Scalar z2 = r[2] * r[2] / r2;
  const Scalar factor = Scalar(-1.5 * grav.j2 * grav.mu * grav.radius * grav.radius) / (r2 * r2 * rn);
  Vector3T<Scalar> a;
  a << factor * r[0] * (Scalar(1.0) - Scalar(5.0) * z2),
      factor * r[1] * (Scalar(1.0) - Scalar(5.0) * z2),
      factor * r[2] * (Scalar(3.0) - Scalar(5.0) * z2);
  return a;
}

/// J2 perturbing potential energy per unit mass (force = -grad).
template <typename Scalar>
Scalar j2_potential(const Vector3T<Scalar>& r, const Gravity& grav) {
  using std::sqrt;
  const Scalar r2 = r.dot(r);
  const Scalar rn = sqrt(r2);
  const Scalar z2 = r[2] * r[2] / r2;
  return Scalar(0.5 * grav.mu * grav.j2 * grav.radius * grav.radius) / (r2 * rn) *
         (Scalar(3.0) * z2 - Scalar(1.0));
}

/// First-order secular J2 nodal rate for a near-circular orbit, rad/s.
inline double j2_nodal_rate(double a, double i, const Gravity& grav, double e = 0.0) {
  const double p = a * (1.0 - e * e);
  const double n = std::sqrt(grav.mu / (a * a * a));
  return -1.5 * grav.j2 * (grav.radius / p) * (grav.radius / p) * n * std::cos(i);
}

/// First-order secular rate of the mean argument of latitude (argp + M), rad/s.
inline double j2_latitude_rate(double a, double i, const Gravity& grav, double e = 0.0) {
  const double p = a * (1.0 - e * e);
  const double eta = std::sqrt(1.0 - e * e);
  const double n = std::sqrt(grav.mu / (a * a * a));
  const double c2 = std::cos(i) * std::cos(i);
  const double q = 0.75 * grav.j2 * (grav.radius / p) * (grav.radius / p);
  return n * (1.0 + q * (eta * (3.0 * c2 - 1.0) + (5.0 * c2 - 1.0)));
}

}  // namespace ltmpc
