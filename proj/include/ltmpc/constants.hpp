#pragma once

#include <cmath>
#include <numbers>

namespace ltmpc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDeg = kPi / 180.0;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// Earth model used by every force and element conversion.
/// Units: km, s.
struct Gravity {
  double mu = 398600.4418;         // km^3/s^2
  double radius = 6378.1363;       // km
  double j2 = 1.08262668e-3;
  double rotation_rate = 7.2921159e-5;  // rad/s

  static Gravity earth() { return {}; }
  static Gravity two_body() {
    Gravity g;
    g.j2 = 0.0;
    return g;
  }

  /// Canonical units: 1 DU = radius, 1 TU = sqrt(radius^3 / mu).
  double time_unit() const { return std::sqrt(radius * radius * radius / mu); }
  double velocity_unit() const { return radius / time_unit(); }
  double accel_unit() const { return radius / (time_unit() * time_unit()); }
};

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pi(double x) {
  double y = wrap_two_pi(x);
  if (y > kPi) y -= kTwoPi;
  return y;
}

}  // namespace ltmpc
