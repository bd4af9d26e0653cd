#include "ltmpc/geqoe.hpp"

#include "ltmpc/gravity.hpp"

namespace ltmpc {

GEqOEState cart_to_geqoe(const CartesianState& x, const Gravity& grav) {
  const double mu = grav.mu;
  const double r = x.r.norm();
  const Vector3 hv = x.r.cross(x.v);
  const double h = hv.norm();
  if (!(h > 1e-12 * r * x.v.norm())) throw std::domain_error("rectilinear state");

  const double U = j2_potential<double>(x.r, grav);
  const double energy = 0.5 * x.v.squaredNorm() - mu / r + U;
  if (!(energy < 0.0)) throw std::domain_error("unbound orbit (total energy >= 0)");

  double q2, q1;
  detail::inclination_vector<double>(hv / h, q2, q1);
  Vector3 ex, ey;
  detail::equinoctial_basis(q2, q1, ex, ey);
  const double L = std::atan2(x.r.dot(ey), x.r.dot(ex));

  const double c = std::sqrt(h * h + 2.0 * r * r * U);
  const double rho = c * c / mu;
  const double rdot = x.r.dot(x.v) / r;
  const double u = rho / r - 1.0;
  const double w = c * rdot / mu;

  GEqOEState s;
  s.nu = std::pow(-2.0 * energy, 1.5) / mu;
  s.p1 = u * std::sin(L) - w * std::cos(L);
  s.p2 = u * std::cos(L) + w * std::sin(L);
  s.q1 = q1;
  s.q2 = q2;

  const double a = -mu / (2.0 * energy);
  const double K = detail::conic_eccentric_longitude(a, s.p2, s.p1, r * std::cos(L), r * std::sin(L));
  s.L_gen = wrap_two_pi(K + s.p1 * std::cos(K) - s.p2 * std::sin(K));
  return s;
}

CartesianState geqoe_to_cart(const GEqOEState& s, const Gravity& grav, double epoch) {
  const double mu = grav.mu;
  const double a = std::cbrt(mu / (s.nu * s.nu));
  const double K = detail::solve_equinoctial_kepler(s.L_gen, s.p2, s.p1);
  double X, Y;
  detail::conic_position(a, s.p2, s.p1, K, X, Y);
  const double r = std::hypot(X, Y);
  const double rdot = std::sqrt(mu * a) / r * (s.p2 * std::sin(K) - s.p1 * std::cos(K));

  Vector3 ex, ey;
  detail::equinoctial_basis(s.q2, s.q1, ex, ey);
  const Vector3 r_hat = (X * ex + Y * ey) / r;
  const Vector3 w_hat = ex.cross(ey);
  const Vector3 t_hat = w_hat.cross(r_hat);

  CartesianState x;
  x.r = r * r_hat;
  x.epoch = epoch;
  const double U = j2_potential<double>(x.r, grav);
  const double c = std::cbrt(mu * mu / s.nu) * std::sqrt(1.0 - s.p1 * s.p1 - s.p2 * s.p2);
  const double h2 = c * c - 2.0 * r * r * U;
  if (!(h2 > 0.0)) throw std::domain_error("GEqOE state maps to non-positive angular momentum");
  x.v = rdot * r_hat + (std::sqrt(h2) / r) * t_hat;
  return x;
}

Vector6 geqoe_scaled(const GEqOEState& s, const Gravity& grav) {
  Vector6 x = s.to_vector();
  x[0] *= grav.time_unit();
  return x;
}

GEqOEState geqoe_unscaled(const Vector6& x, const Gravity& grav) {
  GEqOEState s = GEqOEState::from_vector(x);
  s.nu /= grav.time_unit();
  return s;
}

Vector6 geqoe_scaled_difference(const Vector6& b, const Vector6& a) {
  Vector6 d = b - a;
  d[3] = wrap_pi(d[3]);
  return d;
}

}  // namespace ltmpc
