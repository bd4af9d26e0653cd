#include "ltmpc/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <boost/numeric/odeint.hpp>

#include "ltmpc/dual.hpp"
#include "ltmpc/geqoe.hpp"
#include "ltmpc/gravity.hpp"

namespace ltmpc {

namespace odeint = boost::numeric::odeint;

// ---------------------------------------------------------------------------
// DC' sweep

std::vector<SweepPoint> dcprime_sweep(const Scenario& scenario, const std::vector<double>& dc_values) {
  std::vector<SweepPoint> points;
  for (double dc : dc_values) {
    SweepPoint p;
    p.dc_ref = dc;
    try {
      if (!(dc > 0.0 && dc <= scenario.sc.duty_cycle))
        throw std::invalid_argument("DC' must lie in (0, DC]");
      Scenario s = scenario;
      s.guidance.dc_ref = dc;
      s.guidance.errors = ThrustErrorModel{};
      s.guidance.forced_misthrust_segments = 0;
      const GuidanceLog log = run_guidance(s);
      p.ok = !log.aborted;
      p.error = log.message;
      p.ref_tof = log.reference_tof;
      p.tof = log.summary.tof;
      p.ref_dv = log.reference_dv;
      p.dv = log.summary.dv;
      p.recomputations = log.recomputations;
    } catch (const GuidanceFailure& e) {
      p.error = e.what();
      p.recomputations = e.log.recomputations;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    points.push_back(p);
  }
  return points;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::string out = "dc_ref,ok,ref_tof_d,tof_d,ref_dv_ms,dv_ms,recomputations,error\n";
  for (const SweepPoint& p : points) {
    std::string err = p.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    out += format_double(p.dc_ref) + "," + (p.ok ? "1" : "0") + "," + format_double(p.ref_tof) + "," +
           format_double(p.tof) + "," + format_double(p.ref_dv) + "," + format_double(p.dv) + "," +
           std::to_string(p.recomputations) + "," + err + "\n";
  }
  return out;
}

Json sweep_to_json(const std::vector<SweepPoint>& points) {
  Json arr = Json::array();
  for (const SweepPoint& p : points) {
    arr.push_back({{"dc_ref", p.dc_ref},
                   {"ok", p.ok},
                   {"ref_tof_d", p.ref_tof},
                   {"tof_d", p.tof},
                   {"ref_dv_ms", p.ref_dv},
                   {"dv_ms", p.dv},
                   {"recomputations", p.recomputations},
                   {"error", p.error}});
  }
  return Json{{"points", arr}};
}

// ---------------------------------------------------------------------------
// Coordinate systems

const char* to_string(CoordinateSystem c) {
  switch (c) {
    case CoordinateSystem::cartesian: return "cartesian";
    case CoordinateSystem::keplerian: return "keplerian";
    case CoordinateSystem::classical_equinoctial: return "classical_equinoctial";
    case CoordinateSystem::modified_equinoctial: return "modified_equinoctial";
    case CoordinateSystem::geqoe: return "geqoe";
  }
  return "?";
}

namespace {

// Which components are angles (wrapped when differencing).
std::array<bool, 6> angle_mask(CoordinateSystem c) {
  switch (c) {
    case CoordinateSystem::keplerian: return {false, false, true, true, true, true};
    case CoordinateSystem::classical_equinoctial:
    case CoordinateSystem::modified_equinoctial: return {false, false, false, false, false, true};
    case CoordinateSystem::geqoe: return {false, false, false, true, false, false};
    default: return {};
  }
}

Vector6 coordinate_difference(CoordinateSystem c, const Vector6& b, const Vector6& a) {
  Vector6 d = b - a;
  const auto mask = angle_mask(c);
  for (int k = 0; k < 6; ++k)
    if (mask[k]) d[k] = wrap_pi(d[k]);
  return d;
}

}  // namespace

Vector6 coordinates(CoordinateSystem c, const CartesianState& x, const Gravity& grav) {
  const double du = grav.radius;
  switch (c) {
    case CoordinateSystem::cartesian: {
      Vector6 y;
      y << x.r / du, x.v / grav.velocity_unit();
      return y;
    }
    case CoordinateSystem::keplerian: {
      const KeplerianElements k = cart_to_kep(x, grav.mu);
      return (Vector6() << k.a / du, k.e, k.i, k.raan, k.argp, true_to_mean_anomaly(k.ta, k.e)).finished();
    }
    case CoordinateSystem::classical_equinoctial: {
      Vector6 y = cart_to_classical_equinoctial(x, grav.mu).to_vector();
      y[0] /= du;
      return y;
    }
    case CoordinateSystem::modified_equinoctial: {
      Vector6 y = cart_to_equinoctial(x, grav.mu).to_vector();
      y[0] /= du;
      return y;
    }
    case CoordinateSystem::geqoe:
      return geqoe_scaled(cart_to_geqoe(x, grav), grav);
  }
  return Vector6::Zero();
}

Matrix6 coordinate_jacobian(CoordinateSystem c, const CartesianState& x, const Gravity& grav) {
  constexpr double h = 1e-6;  // canonical units
  const Vector6 scale = (Vector6() << Vector3::Constant(grav.radius), Vector3::Constant(grav.velocity_unit()))
                            .finished();
  const Vector6 x0 = x.to_vector();
  Matrix6 jac;
  for (int k = 0; k < 6; ++k) {
    Vector6 xp = x0, xm = x0;
    xp[k] += h * scale[k];
    xm[k] -= h * scale[k];
    jac.col(k) = coordinate_difference(c, coordinates(c, CartesianState::from_vector(xp, x.epoch), grav),
                                       coordinates(c, CartesianState::from_vector(xm, x.epoch), grav)) /
                 (2.0 * h);
  }
  return jac;
}

// ---------------------------------------------------------------------------
// J2 variational equations, canonical units

namespace {

using VarState = std::array<double, 42>;

struct J2Variational {
  Gravity canon;  // mu = 1, radius = 1

  void operator()(const VarState& y, VarState& dy, double /*t*/) const {
    const Vector3 r(y[0], y[1], y[2]);
    const Vector3 a = two_body_acceleration<double>(r, canon.mu) + j2_acceleration<double>(r, canon);
    Matrix3 grad;
    for (int j = 0; j < 3; ++j) {
      Vector3T<Dual> rd;
      for (int k = 0; k < 3; ++k) rd[k] = Dual(r[k], k == j ? 1.0 : 0.0);
      const Vector3T<Dual> ad = two_body_acceleration<Dual>(rd, canon.mu) + j2_acceleration<Dual>(rd, canon);
      for (int k = 0; k < 3; ++k) grad(k, j) = ad[k].der;
    }
    for (int k = 0; k < 3; ++k) {
      dy[k] = y[3 + k];
      dy[3 + k] = a[k];
    }
    Eigen::Map<const Matrix6> phi(y.data() + 6);
    Eigen::Map<Matrix6> dphi(dy.data() + 6);
    dphi.topRows<3>() = phi.bottomRows<3>();
    dphi.bottomRows<3>() = grad * phi.topRows<3>();
  }
};

}  // namespace

std::vector<std::pair<CartesianState, Matrix6>> j2_stm_per_orbit(const CartesianState& x0, int orbits,
                                                                 const Gravity& grav, double period) {
  J2Variational rhs;
  rhs.canon.mu = 1.0;
  rhs.canon.radius = 1.0;
  rhs.canon.j2 = grav.j2;
  const double tu = grav.time_unit(), du = grav.radius, vu = grav.velocity_unit();

  VarState y{};
  for (int k = 0; k < 3; ++k) {
    y[k] = x0.r[k] / du;
    y[3 + k] = x0.v[k] / vu;
  }
  Eigen::Map<Matrix6>(y.data() + 6).setIdentity();

  if (period <= 0.0) {
    const double a = cart_to_kep(x0, grav.mu).a;
    period = kTwoPi * std::sqrt(a * a * a / grav.mu);
  }
  period /= tu;

  std::vector<std::pair<CartesianState, Matrix6>> out;
  auto stepper = odeint::make_controlled(1e-14, 1e-13, odeint::runge_kutta_fehlberg78<VarState>());
  double t = 0.0;
  for (int k = 1; k <= orbits; ++k) {
    const double t_next = k * period;
    odeint::integrate_adaptive(stepper, rhs, y, t, t_next, period / 200.0);
    t = t_next;
    CartesianState x;
    x.r = Vector3(y[0], y[1], y[2]) * du;
    x.v = Vector3(y[3], y[4], y[5]) * vu;
    x.epoch = x0.epoch + t * tu;
    out.emplace_back(x, Eigen::Map<const Matrix6>(y.data() + 6));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinearity index

double NonlinearityReport::at(CoordinateSystem c, int orbit) const {
  const std::size_t sys = static_cast<std::size_t>(c);
  for (std::size_t k = 0; k < orbits.size(); ++k)
    if (orbits[k] == orbit) return index[sys][k];
  throw std::out_of_range("orbit count not in report");
}

namespace {

double norm2(const Matrix6& m) { return Eigen::JacobiSVD<Matrix6>(m).singularValues()[0]; }

// STM of each system after every orbit.
std::array<std::vector<Matrix6>, 5> system_stms(const CartesianState& x0, int orbits, const Gravity& grav,
                                                double period) {
  const auto traj = j2_stm_per_orbit(x0, orbits, grav, period);
  std::array<std::vector<Matrix6>, 5> out;
  for (CoordinateSystem c : kCoordinateSystems) {
    const Matrix6 j0_inv = coordinate_jacobian(c, x0, grav).inverse();
    auto& stms = out[static_cast<std::size_t>(c)];
    for (const auto& [xf, phi] : traj) stms.push_back(coordinate_jacobian(c, xf, grav) * phi * j0_inv);
  }
  return out;
}

}  // namespace

NonlinearityReport nonlinearity_index(const CartesianState& x0, const NonlinearityOptions& options,
                                      const Gravity& grav) {
  if (options.samples < 8) throw std::invalid_argument("nonlinearity index needs at least 8 samples");
  if (options.orbits < 1) throw std::invalid_argument("orbits must be >= 1");
  if (options.sigma_r < 0.0 || options.sigma_v < 0.0) throw std::invalid_argument("negative uncertainty");

  NonlinearityReport rep;
  rep.sigma_r = options.sigma_r;
  rep.sigma_v = options.sigma_v;
  rep.samples = options.samples;
  for (int k = 1; k <= options.orbits; ++k) rep.orbits.push_back(k);
  for (auto& v : rep.index) v.assign(options.orbits, 0.0);

  // Every sample is compared at the nominal orbit epochs.
  const double a = cart_to_kep(x0, grav.mu).a;
  const double period = kTwoPi * std::sqrt(a * a * a / grav.mu);
  const auto nominal = system_stms(x0, options.orbits, grav, period);
  std::array<std::vector<double>, 5> nominal_norm;
  for (std::size_t s = 0; s < 5; ++s)
    for (const Matrix6& m : nominal[s]) nominal_norm[s].push_back(norm2(m));

  // Directions uniform on the unit 6-sphere, scaled to the 1-sigma ellipsoid.
  const CounterRng rng(options.seed);
  for (int i = 0; i < options.samples; ++i) {
    Vector6 d;
    for (int k = 0; k < 6; ++k) d[k] = rng.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k), 0);
    d.normalize();
    CartesianState xi = x0;
    xi.r += options.sigma_r * d.head<3>();
    xi.v += options.sigma_v * d.tail<3>();
    const auto perturbed = system_stms(xi, options.orbits, grav, period);
    for (std::size_t s = 0; s < 5; ++s) {
      for (int k = 0; k < options.orbits; ++k) {
        const double v = norm2(perturbed[s][k] - nominal[s][k]) / nominal_norm[s][k];
        rep.index[s][k] = std::max(rep.index[s][k], v);
      }
    }
  }
  return rep;
}

std::string nonlinearity_to_csv(const NonlinearityReport& r) {
  std::string out = "orbits";
  for (CoordinateSystem c : kCoordinateSystems) out += std::string(",") + to_string(c);
  out += '\n';
  for (std::size_t k = 0; k < r.orbits.size(); ++k) {
    out += std::to_string(r.orbits[k]);
    for (std::size_t s = 0; s < 5; ++s) out += "," + format_double(r.index[s][k]);
    out += '\n';
  }
  return out;
}

Json nonlinearity_to_json(const NonlinearityReport& r) {
  Json j;
  j["norm"] = r.norm;
  j["sigma_r_km"] = r.sigma_r;
  j["sigma_v_kms"] = r.sigma_v;
  j["samples"] = r.samples;
  j["dynamics"] = "two-body + J2";
  j["orbits"] = r.orbits;
  Json idx;
  for (CoordinateSystem c : kCoordinateSystems) idx[to_string(c)] = r.index[static_cast<std::size_t>(c)];
  j["index"] = idx;
  return j;
}

}  // namespace ltmpc
