#pragma once

// Forward-mode dual number. Used to evaluate directional derivatives of the
// element maps (element rates under a perturbing acceleration).

#include <Eigen/Core>
#include <cmath>

namespace ltmpc {

struct Dual {
  double val = 0.0;
  double der = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT: implicit from constants
  constexpr Dual(double v, double d) : val(v), der(d) {}

  Dual& operator+=(const Dual& o) { val += o.val; der += o.der; return *this; }
  Dual& operator-=(const Dual& o) { val -= o.val; der -= o.der; return *this; }
  Dual& operator*=(const Dual& o) { der = der * o.val + val * o.der; val *= o.val; return *this; }
  Dual& operator/=(const Dual& o) {
    der = (der * o.val - val * o.der) / (o.val * o.val);
    val /= o.val;
    return *this;
  }
};

inline Dual operator-(const Dual& a) { return {-a.val, -a.der}; }
inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
inline bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
inline bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
inline bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }
inline bool operator==(const Dual& a, const Dual& b) { return a.val == b.val; }
inline bool operator!=(const Dual& a, const Dual& b) { return a.val != b.val; }

inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.val);
  return {s, a.der / (2.0 * s)};
}
inline Dual sin(const Dual& a) { return {std::sin(a.val), a.der * std::cos(a.val)}; }
inline Dual cos(const Dual& a) { return {std::cos(a.val), -a.der * std::sin(a.val)}; }
inline Dual tan(const Dual& a) {
  const double t = std::tan(a.val);
  return {t, a.der * (1.0 + t * t)};
}
inline Dual atan(const Dual& a) { return {std::atan(a.val), a.der / (1.0 + a.val * a.val)}; }
inline Dual atan2(const Dual& y, const Dual& x) {
  const double r2 = x.val * x.val + y.val * y.val;
  return {std::atan2(y.val, x.val), (x.val * y.der - y.val * x.der) / r2};
}
inline Dual acos(const Dual& a) {
  return {std::acos(a.val), -a.der / std::sqrt(1.0 - a.val * a.val)};
}
inline Dual abs(const Dual& a) { return a.val < 0.0 ? -a : a; }
inline Dual pow(const Dual& a, double p) {
  const double v = std::pow(a.val, p);
  return {v, p * std::pow(a.val, p - 1.0) * a.der};
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.val; }

}  // namespace ltmpc

namespace Eigen {
template <>
struct NumTraits<ltmpc::Dual> : NumTraits<double> {
  using Real = ltmpc::Dual;
  using NonInteger = ltmpc::Dual;
  using Nested = ltmpc::Dual;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 4
  };
};
}  // namespace Eigen
