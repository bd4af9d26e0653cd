#pragma once

namespace ltmpc {

struct DensitySample {
  double rho = 0.0;      // kg/m^3
  bool clamped = false;  // altitude was outside the 100-1000 km table
};

/// Harris-Priester density, mean of the minimum and maximum (diurnal) profiles.
DensitySample harris_priester_density(double altitude_km);

/// Convenience wrapper; logs once to stderr when the altitude is clamped.
double atmospheric_density(double altitude_km);

}  // namespace ltmpc
