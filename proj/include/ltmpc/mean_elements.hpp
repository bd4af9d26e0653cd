#pragma once

// Mean <-> osculating element mapping with first-order J2 short-period terms.
//
// The short-period part of each classical equinoctial element is the
// zero-mean antiderivative (in mean longitude) of its J2 rate along the mean
// Keplerian orbit, including the mean-motion coupling of the semi-major axis
// into the mean longitude. The rates are sampled at equally spaced mean
// longitudes and integrated term by term in Fourier space.

#include "ltmpc/constants.hpp"
#include "ltmpc/elements.hpp"

namespace ltmpc {

/// Osculating minus mean, evaluated at the given mean elements. Components
/// follow ClassicalEquinoctial::to_vector().
Vector6 j2_short_period(const ClassicalEquinoctial& mean, const Gravity& grav);

ClassicalEquinoctial mean_to_osc(const ClassicalEquinoctial& mean, const Gravity& grav);
/// Fixed-point inversion of mean_to_osc. Requires e < 0.1.
ClassicalEquinoctial osc_to_mean(const ClassicalEquinoctial& osc, const Gravity& grav);

KeplerianElements mean_to_osc(const KeplerianElements& mean, const Gravity& grav);
KeplerianElements osc_to_mean(const KeplerianElements& osc, const Gravity& grav);

ClassicalEquinoctial cart_to_mean_equinoctial(const CartesianState& x, const Gravity& grav);
KeplerianElements cart_to_mean_kep(const CartesianState& x, const Gravity& grav);

struct MeanState {
  KeplerianElements kep;  // mean
  double u = 0.0;         // mean argument of latitude, [0, 2pi)
  double u_rate = 0.0;    // secular rate of u, rad/s
};

MeanState mean_state(const CartesianState& x, const Gravity& grav);

/// Mean argument of latitude (mean argp + mean true anomaly), [0, 2pi).
double mean_argument_of_latitude(const CartesianState& x, const Gravity& grav);

}  // namespace ltmpc
