#include "ltmpc/eclipse.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <stdexcept>

namespace ltmpc {

double julian_date_from_iso(const std::string& iso) {
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0;
  double ss = 0.0;
  const int n = std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &hh, &mm, &ss);
  if (n < 3 || mo < 1 || mo > 12 || d < 1 || d > 31 || hh < 0 || hh > 23 || mm < 0 || mm > 59 ||
      ss < 0.0 || ss >= 61.0) {
    throw std::invalid_argument("malformed ISO-8601 epoch: " + iso);
  }
  // Fliegel-Van Flandern day number.
  const int a = (14 - mo) / 12;
  const int yy = y + 4800 - a;
  const int m = mo + 12 * a - 3;
  const long jdn = d + (153 * m + 2) / 5 + 365L * yy + yy / 4 - yy / 100 + yy / 400 - 32045;
  return static_cast<double>(jdn) - 0.5 + (hh + (mm + ss / 60.0) / 60.0) / 24.0;
}

Vector3 sun_direction(double julian_date) {
  const double T = (julian_date - 2451545.0) / 36525.0;
  const double M = (357.5256 + 35999.049 * T) * kDeg;
  const double lon =
      (282.9400 + 357.5256 + 35999.049 * T) * kDeg + (6892.0 * std::sin(M) + 72.0 * std::sin(2.0 * M)) / 3600.0 * kDeg;
  const double eps = 23.43929111 * kDeg;
  return {std::cos(lon), std::sin(lon) * std::cos(eps), std::sin(lon) * std::sin(eps)};
}

double eclipse_center(double raan, double i, const Vector3& sun_dir) {
  const Vector3 P(std::cos(raan), std::sin(raan), 0.0);
  const Vector3 Q(-std::cos(i) * std::sin(raan), std::cos(i) * std::cos(raan), std::sin(i));
  return wrap_two_pi(std::atan2(-Q.dot(sun_dir), -P.dot(sun_dir)));
}

int eclipse_indicator(double mean_arg_lat, double l_c, double dc) {
  if (dc >= 1.0) return 1;
  const double half = 0.5 * kPi * (1.0 - dc);
  const double q1 = std::acos(std::cos(mean_arg_lat - l_c));
  const double q2 = std::acos(std::cos(mean_arg_lat - l_c - kPi));
  return (q1 < half || q2 < half) ? 0 : 1;
}

std::array<double, 4> eclipse_switch_points(double l_c, double dc) {
  const double half = 0.5 * kPi * (1.0 - dc);
  return {wrap_two_pi(l_c - half), wrap_two_pi(l_c + half), wrap_two_pi(l_c + kPi - half),
          wrap_two_pi(l_c + kPi + half)};
}

std::vector<double> latitude_crossings(double u0, double rate, double dt,
                                       const std::vector<double>& points) {
  std::vector<double> out;
  if (!(rate > 0.0) || !(dt > 0.0)) return out;
  const double span = rate * dt;
  for (double p : points) {
    double first = wrap_two_pi(p - u0);
    if (first == 0.0) first = kTwoPi;
    for (double d = first; d < span; d += kTwoPi) out.push_back(d / rate);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double EclipseModel::l_c(double t, double raan, double i) const {
  return eclipse_center(raan, i, sun_direction(jd0 + t / kSecondsPerDay));
}

}  // namespace ltmpc
