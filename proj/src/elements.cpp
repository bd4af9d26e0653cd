#include "ltmpc/elements.hpp"

#include <string>

namespace ltmpc {

namespace {

constexpr double kTinyEccentricity = 1e-14;
constexpr double kTinyInclination = 1e-14;

void require_elliptic(double e) {
  if (!(e < 1.0)) {
    throw std::domain_error("orbit is not elliptic (e = " + std::to_string(e) + ")");
  }
}

}  // namespace

double true_to_mean_anomaly(double ta, double e) {
  const double E = std::atan2(std::sqrt(1.0 - e * e) * std::sin(ta), e + std::cos(ta));
  return wrap_two_pi(E - e * std::sin(E));
}

double mean_to_true_anomaly(double M, double e) {
  M = wrap_pi(M);
  double E = (e < 0.8) ? M : kPi;
  for (int it = 0; it < 50; ++it) {
    const double step = (E - e * std::sin(E) - M) / (1.0 - e * std::cos(E));
    E -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return wrap_two_pi(std::atan2(std::sqrt(1.0 - e * e) * std::sin(E), std::cos(E) - e));
}

EquinoctialElements cart_to_equinoctial(const CartesianState& x, double mu) {
  const Vector3 hv = x.r.cross(x.v);
  const double hmag = hv.norm();
  if (!(hmag > 1e-12 * x.r.norm() * x.v.norm()) || x.r.norm() == 0.0) {
    throw std::domain_error("rectilinear or degenerate state");
  }
  double h, k;
  detail::inclination_vector<double>(hv / hmag, h, k);
  Vector3 f_hat, g_hat;
  detail::equinoctial_basis(h, k, f_hat, g_hat);
  const Vector3 e_vec = x.v.cross(hv) / mu - x.r.normalized();

  EquinoctialElements eq;
  eq.p = hmag * hmag / mu;
  eq.f = e_vec.dot(f_hat);
  eq.g = e_vec.dot(g_hat);
  eq.h = h;
  eq.k = k;
  eq.L = wrap_two_pi(std::atan2(x.r.dot(g_hat), x.r.dot(f_hat)));
  return eq;
}

CartesianState equinoctial_to_cart(const EquinoctialElements& eq, double mu, double epoch) {
  Vector3 f_hat, g_hat;
  detail::equinoctial_basis(eq.h, eq.k, f_hat, g_hat);
  const double cL = std::cos(eq.L);
  const double sL = std::sin(eq.L);
  const double w = 1.0 + eq.f * cL + eq.g * sL;
  const double r = eq.p / w;
  const double vs = std::sqrt(mu / eq.p);
  CartesianState x;
  x.r = r * (cL * f_hat + sL * g_hat);
  x.v = vs * (-(sL + eq.g) * f_hat + (cL + eq.f) * g_hat);
  x.epoch = epoch;
  return x;
}

EquinoctialElements kep_to_equinoctial(const KeplerianElements& kep) {
  require_elliptic(kep.e);
  if (kep.e < 0.0 || !(kep.a > 0.0)) throw std::domain_error("invalid a or e");
  if (!(kep.i < kPi - 1e-12) || kep.i < 0.0) {
    throw std::domain_error("inclination must lie in [0, pi) for equinoctial elements");
  }
  const double lon_peri = kep.raan + kep.argp;
  const double t = std::tan(0.5 * kep.i);
  EquinoctialElements eq;
  eq.p = kep.a * (1.0 - kep.e * kep.e);
  eq.f = kep.e * std::cos(lon_peri);
  eq.g = kep.e * std::sin(lon_peri);
  eq.h = t * std::cos(kep.raan);
  eq.k = t * std::sin(kep.raan);
  eq.L = wrap_two_pi(lon_peri + kep.ta);
  return eq;
}

KeplerianElements equinoctial_to_kep(const EquinoctialElements& eq, ElementKind kind) {
  KeplerianElements kep;
  kep.kind = kind;
  kep.e = std::hypot(eq.f, eq.g);
  require_elliptic(kep.e);
  kep.a = eq.p / (1.0 - kep.e * kep.e);
  const double t = std::hypot(eq.h, eq.k);
  kep.i = 2.0 * std::atan(t);
  kep.raan = (t > kTinyInclination) ? wrap_two_pi(std::atan2(eq.k, eq.h)) : 0.0;
  const double lon_peri = (kep.e > kTinyEccentricity) ? std::atan2(eq.g, eq.f) : kep.raan;
  kep.argp = wrap_two_pi(lon_peri - kep.raan);
  kep.ta = wrap_two_pi(eq.L - lon_peri);
  return kep;
}

KeplerianElements cart_to_kep(const CartesianState& x, double mu) {
  const EquinoctialElements eq = cart_to_equinoctial(x, mu);
  if (!(std::hypot(eq.f, eq.g) < 1.0)) throw std::domain_error("hyperbolic or parabolic state");
  return equinoctial_to_kep(eq, ElementKind::osculating);
}

CartesianState kep_to_cart(const KeplerianElements& kep, double mu, double epoch) {
  return equinoctial_to_cart(kep_to_equinoctial(kep), mu, epoch);
}

ClassicalEquinoctial cart_to_classical_equinoctial(const CartesianState& x, double mu) {
  const Vector6 ce = detail::cart_to_classical_equinoctial<double>(x.r, x.v, mu);
  ClassicalEquinoctial out = ClassicalEquinoctial::from_vector(ce);
  out.lambda = wrap_two_pi(out.lambda);
  return out;
}

CartesianState classical_equinoctial_to_cart(const ClassicalEquinoctial& ce, double mu,
                                             double epoch) {
  const double F = detail::solve_equinoctial_kepler(ce.lambda, ce.f, ce.g);
  double X, Y;
  detail::conic_position(ce.a, ce.f, ce.g, F, X, Y);
  const double beta = 1.0 / (1.0 + std::sqrt(1.0 - ce.f * ce.f - ce.g * ce.g));
  const double cF = std::cos(F);
  const double sF = std::sin(F);
  const double r = ce.a * (1.0 - ce.f * cF - ce.g * sF);
  const double n = std::sqrt(mu / (ce.a * ce.a * ce.a));
  const double scale = n * ce.a * ce.a / r;
  const double Xd = scale * (ce.f * ce.g * beta * cF - (1.0 - ce.g * ce.g * beta) * sF);
  const double Yd = scale * ((1.0 - ce.f * ce.f * beta) * cF - ce.f * ce.g * beta * sF);

  Vector3 f_hat, g_hat;
  detail::equinoctial_basis(ce.h, ce.k, f_hat, g_hat);
  CartesianState x;
  x.r = X * f_hat + Y * g_hat;
  x.v = Xd * f_hat + Yd * g_hat;
  x.epoch = epoch;
  return x;
}

ClassicalEquinoctial kep_to_classical_equinoctial(const KeplerianElements& kep) {
  const EquinoctialElements eq = kep_to_equinoctial(kep);
  ClassicalEquinoctial ce;
  ce.a = kep.a;
  ce.f = eq.f;
  ce.g = eq.g;
  ce.h = eq.h;
  ce.k = eq.k;
  ce.lambda = wrap_two_pi(kep.raan + kep.argp + true_to_mean_anomaly(kep.ta, kep.e));
  return ce;
}

KeplerianElements classical_equinoctial_to_kep(const ClassicalEquinoctial& ce, ElementKind kind) {
  KeplerianElements kep;
  kep.kind = kind;
  kep.a = ce.a;
  kep.e = std::hypot(ce.f, ce.g);
  require_elliptic(kep.e);
  const double t = std::hypot(ce.h, ce.k);
  kep.i = 2.0 * std::atan(t);
  kep.raan = (t > kTinyInclination) ? wrap_two_pi(std::atan2(ce.k, ce.h)) : 0.0;
  const double lon_peri = (kep.e > kTinyEccentricity) ? std::atan2(ce.g, ce.f) : kep.raan;
  kep.argp = wrap_two_pi(lon_peri - kep.raan);
  kep.ta = mean_to_true_anomaly(ce.lambda - lon_peri, kep.e);
  return kep;
}

Matrix3 rtn_basis(const Vector3& r, const Vector3& v) {
  const Vector3 r_hat = r.normalized();
  const Vector3 n_hat = r.cross(v).normalized();
  Matrix3 basis;
  basis.col(0) = r_hat;
  basis.col(1) = n_hat.cross(r_hat);
  basis.col(2) = n_hat;
  return basis;
}

}  // namespace ltmpc
