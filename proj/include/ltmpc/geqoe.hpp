#pragma once

// Generalized equinoctial orbital elements (GEqOE) with the J2 zonal term
// folded into the total energy.
//
// Component order for vector forms: (nu, p1, p2, L, q1, q2).

#include "ltmpc/constants.hpp"
#include "ltmpc/elements.hpp"

namespace ltmpc {

struct GEqOEState {
  double nu = 0.0;     // generalized mean motion, rad/s
  double p1 = 0.0;     // g sin(Psi)
  double p2 = 0.0;     // g cos(Psi)
  double L_gen = 0.0;  // generalized mean longitude, rad
  double q1 = 0.0;     // tan(i/2) sin(raan)
  double q2 = 0.0;     // tan(i/2) cos(raan)

  Vector6 to_vector() const { return (Vector6() << nu, p1, p2, L_gen, q1, q2).finished(); }
  static GEqOEState from_vector(const Vector6& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5]};
  }
};

/// Throws std::domain_error when the total energy is non-negative or the
/// state is rectilinear.
GEqOEState cart_to_geqoe(const CartesianState& x, const Gravity& grav);
CartesianState geqoe_to_cart(const GEqOEState& s, const Gravity& grav, double epoch = 0.0);

/// Dimensionless vector: nu in canonical units (1/TU), the rest unchanged.
Vector6 geqoe_scaled(const GEqOEState& s, const Gravity& grav);
GEqOEState geqoe_unscaled(const Vector6& x, const Gravity& grav);

/// Difference b - a in scaled coordinates with the longitude wrapped to (-pi, pi].
Vector6 geqoe_scaled_difference(const Vector6& b, const Vector6& a);

}  // namespace ltmpc
