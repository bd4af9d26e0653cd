#pragma once

// Solar direction and the duty-cycle / eclipse gate.

#include <array>
#include <string>
#include <vector>

#include "ltmpc/elements.hpp"

namespace ltmpc {

/// Julian date (UTC treated as TT) from an ISO-8601 string such as
/// "2022-03-25T00:00:00Z". Throws std::invalid_argument on malformed input.
double julian_date_from_iso(const std::string& iso);

/// Unit vector from Earth to Sun, mean equator and equinox of J2000
/// (low-precision series, a few hundredths of a degree).
Vector3 sun_direction(double julian_date);

/// Eclipse centre expressed as an argument of latitude: the point of the
/// (circular) orbit with node raan and inclination i that points most
/// directly away from the Sun.
double eclipse_center(double raan, double i, const Vector3& sun_dir);

/// 0 inside either arc of half-width (pi/2)(1 - dc) centred on l_c and
/// l_c + pi, 1 elsewhere.
int eclipse_indicator(double mean_arg_lat, double l_c, double dc);

/// Arguments of latitude at which the gate switches, in [0, 2pi). Empty for dc >= 1.
std::array<double, 4> eclipse_switch_points(double l_c, double dc);

/// Offsets in (0, dt) at which the linear latitude u0 + rate * t passes any of
/// the given points (mod 2pi), sorted ascending.
std::vector<double> latitude_crossings(double u0, double rate, double dt,
                                       const std::vector<double>& points);

struct EclipseModel {
  double jd0 = 2451545.0;  // epoch of t = 0
  double dc_ref = 0.4;     // DC' for planning

  /// Eclipse centre for the mean orbit plane at time t (s since jd0).
  double l_c(double t, double raan, double i) const;
};

}  // namespace ltmpc
