#pragma once

// Orbital element sets and the conversions between them.
//
// Angles are radians, lengths km, time s. Conversion kernels are templated on
// the scalar type so that they can be differentiated with ltmpc::Dual.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

#include "ltmpc/constants.hpp"

namespace ltmpc {

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix3 = Eigen::Matrix3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

template <typename Scalar>
using Vector3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6T = Eigen::Matrix<Scalar, 6, 1>;

struct CartesianState {
  Vector3 r = Vector3::Zero();  // km, inertial
  Vector3 v = Vector3::Zero();  // km/s, inertial
  double epoch = 0.0;           // s since scenario start

  Vector6 to_vector() const {
    Vector6 x;
    x << r, v;
    return x;
  }
  static CartesianState from_vector(const Vector6& x, double epoch = 0.0) {
    return {x.head<3>(), x.tail<3>(), epoch};
  }
};

enum class ElementKind { osculating, mean };

struct KeplerianElements {
  double a = 0.0;     // km
  double e = 0.0;
  double i = 0.0;     // rad
  double raan = 0.0;  // rad
  double argp = 0.0;  // rad
  double ta = 0.0;    // true anomaly, rad
  ElementKind kind = ElementKind::osculating;
};

/// Modified equinoctial elements.
struct EquinoctialElements {
  double p = 0.0;  // semi-latus rectum, km
  double f = 0.0;  // e cos(argp + raan)
  double g = 0.0;  // e sin(argp + raan)
  double h = 0.0;  // tan(i/2) cos(raan)
  double k = 0.0;  // tan(i/2) sin(raan)
  double L = 0.0;  // true longitude, rad

  Vector6 to_vector() const { return (Vector6() << p, f, g, h, k, L).finished(); }
  static EquinoctialElements from_vector(const Vector6& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5]};
  }
};

/// Classical equinoctial elements (semi-major axis and mean longitude).
struct ClassicalEquinoctial {
  double a = 0.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;
  double lambda = 0.0;  // mean longitude, rad

  Vector6 to_vector() const { return (Vector6() << a, f, g, h, k, lambda).finished(); }
  static ClassicalEquinoctial from_vector(const Vector6& x) {
    return {x[0], x[1], x[2], x[3], x[4], x[5]};
  }
};

// ---------------------------------------------------------------------------
// Kernels shared by the equinoctial-type element sets.

namespace detail {

/// Equinoctial frame (f_hat, g_hat) from h = tan(i/2) cos(raan), k = tan(i/2) sin(raan).
template <typename Scalar>
void equinoctial_basis(const Scalar& h, const Scalar& k, Vector3T<Scalar>& f_hat,
                       Vector3T<Scalar>& g_hat) {
  const Scalar s2 = Scalar(1.0) + h * h + k * k;
  f_hat << (Scalar(1.0) - k * k + h * h) / s2, Scalar(2.0) * h * k / s2, Scalar(-2.0) * k / s2;
  g_hat << Scalar(2.0) * h * k / s2, (Scalar(1.0) + k * k - h * h) / s2, Scalar(2.0) * h / s2;
}

/// (h, k) from the unit orbit normal.
template <typename Scalar>
void inclination_vector(const Vector3T<Scalar>& w_hat, Scalar& h, Scalar& k) {
  const Scalar denom = Scalar(1.0) + w_hat[2];
  h = -w_hat[1] / denom;
  k = w_hat[0] / denom;
}

/// In-plane coordinates on an ellipse of semi-major axis a with eccentricity
/// vector (f, g) at eccentric longitude F.
template <typename Scalar>
void conic_position(const Scalar& a, const Scalar& f, const Scalar& g, const Scalar& F, Scalar& X,
                    Scalar& Y) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar beta = Scalar(1.0) / (Scalar(1.0) + sqrt(Scalar(1.0) - f * f - g * g));
  const Scalar cF = cos(F);
  const Scalar sF = sin(F);
  X = a * ((Scalar(1.0) - g * g * beta) * cF + f * g * beta * sF - f);
  Y = a * ((Scalar(1.0) - f * f * beta) * sF + f * g * beta * cF - g);
}

/// Inverse of conic_position: eccentric longitude of the in-plane point (X, Y).
template <typename Scalar>
Scalar conic_eccentric_longitude(const Scalar& a, const Scalar& f, const Scalar& g, const Scalar& X,
                                 const Scalar& Y) {
  using std::atan2;
  using std::sqrt;
  const Scalar eta = sqrt(Scalar(1.0) - f * f - g * g);
  const Scalar beta = Scalar(1.0) / (Scalar(1.0) + eta);
  const Scalar sF = g + ((Scalar(1.0) - g * g * beta) * Y - f * g * beta * X) / (a * eta);
  const Scalar cF = f + ((Scalar(1.0) - f * f * beta) * X - f * g * beta * Y) / (a * eta);
  return atan2(sF, cF);
}

/// Solves lambda = F - f sin F + g cos F for F.
inline double solve_equinoctial_kepler(double lambda, double f, double g) {
  double F = lambda;
  for (int it = 0; it < 50; ++it) {
    const double c = std::cos(F);
    const double s = std::sin(F);
    const double res = F - f * s + g * c - lambda;
    const double step = res / (1.0 - f * c - g * s);
    F -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return F;
}

/// Cartesian state to classical equinoctial (a, f, g, h, k, lambda).
template <typename Scalar>
Vector6T<Scalar> cart_to_classical_equinoctial(const Vector3T<Scalar>& r, const Vector3T<Scalar>& v,
                                               double mu) {
  using std::atan2;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Vector3T<Scalar> hv = r.cross(v);
  const Scalar hmag = sqrt(hv.dot(hv));
  const Vector3T<Scalar> w_hat = hv / hmag;
  Scalar h, k;
  inclination_vector(w_hat, h, k);
  Vector3T<Scalar> f_hat, g_hat;
  equinoctial_basis(h, k, f_hat, g_hat);

  const Scalar rmag = sqrt(r.dot(r));
  const Vector3T<Scalar> e_vec = v.cross(hv) / Scalar(mu) - r / rmag;
  const Scalar f = e_vec.dot(f_hat);
  const Scalar g = e_vec.dot(g_hat);
  const Scalar a = Scalar(1.0) / (Scalar(2.0) / rmag - v.dot(v) / Scalar(mu));

  const Scalar X = r.dot(f_hat);
  const Scalar Y = r.dot(g_hat);
  const Scalar F = conic_eccentric_longitude(a, f, g, X, Y);
  const Scalar lambda = F - f * sin(F) + g * cos(F);

  Vector6T<Scalar> out;
  out << a, f, g, h, k, lambda;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public conversions.

/// Osculating Keplerian elements. Throws std::domain_error for e >= 1 or
/// a rectilinear state.
KeplerianElements cart_to_kep(const CartesianState& x, double mu);
CartesianState kep_to_cart(const KeplerianElements& kep, double mu, double epoch = 0.0);

/// Throws std::domain_error for e >= 1 or i = pi.
EquinoctialElements kep_to_equinoctial(const KeplerianElements& kep);
KeplerianElements equinoctial_to_kep(const EquinoctialElements& eq,
                                     ElementKind kind = ElementKind::osculating);

EquinoctialElements cart_to_equinoctial(const CartesianState& x, double mu);
CartesianState equinoctial_to_cart(const EquinoctialElements& eq, double mu, double epoch = 0.0);

ClassicalEquinoctial cart_to_classical_equinoctial(const CartesianState& x, double mu);
CartesianState classical_equinoctial_to_cart(const ClassicalEquinoctial& ce, double mu,
                                             double epoch = 0.0);

ClassicalEquinoctial kep_to_classical_equinoctial(const KeplerianElements& kep);
KeplerianElements classical_equinoctial_to_kep(const ClassicalEquinoctial& ce,
                                               ElementKind kind = ElementKind::osculating);

double true_to_mean_anomaly(double ta, double e);
double mean_to_true_anomaly(double M, double e);

/// Argument of latitude (argp + true anomaly) in [0, 2pi).
inline double argument_of_latitude(const KeplerianElements& kep) {
  return wrap_two_pi(kep.argp + kep.ta);
}

/// Columns: radial, transverse, normal unit vectors.
Matrix3 rtn_basis(const Vector3& r, const Vector3& v);

}  // namespace ltmpc
