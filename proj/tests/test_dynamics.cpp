#include "doctest.h"
#include "test_support.hpp"

#include "ltmpc/atmosphere.hpp"
#include "ltmpc/eclipse.hpp"
#include "ltmpc/geqoe.hpp"
#include "ltmpc/gravity.hpp"
#include "ltmpc/stm.hpp"

using namespace ltmpc;

namespace {

const Gravity kEarth;

double orbit_energy(const CartesianState& x, double mu) { return 0.5 * x.v.squaredNorm() - mu / x.r.norm(); }

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Harris-Priester density") {
  // Published HP rows (g/km^3) at 340 and 360 km, exponential interpolation.
  const double rmin = std::sqrt(7.214 * 4.824), rmax = std::sqrt(18.19 * 13.37);
  const double rho350 = harris_priester_density(350.0).rho;
  CHECK(rho350 == doctest::Approx(0.5 * (rmin + rmax) * 1e-12).epsilon(1e-12));
  CHECK(rho350 >= 1e-12);
  CHECK(rho350 <= 1e-10);
  CHECK(harris_priester_density(1000.0).rho < rho350);
  CHECK(harris_priester_density(200.0).rho > rho350);

  double prev = harris_priester_density(100.0).rho;
  for (double h = 101.0; h <= 1000.0; h += 1.0) {
    const double rho = harris_priester_density(h).rho;
    CHECK(rho <= prev);
    prev = rho;
  }

  SUBCASE("clamped outside the table") {
    CHECK(harris_priester_density(1200.0).clamped);
    CHECK(harris_priester_density(1200.0).rho == harris_priester_density(1000.0).rho);
    CHECK(harris_priester_density(50.0).clamped);
    CHECK_FALSE(harris_priester_density(500.0).clamped);
  }
}

TEST_CASE("eclipse gate") {
  SUBCASE("full duty cycle never gates") {
    for (int k = 0; k < 1000; ++k) CHECK(eclipse_indicator(k * kTwoPi / 1000.0, 0.7, 1.0) == 1);
  }
  SUBCASE("arc centres are off") {
    CHECK(eclipse_indicator(0.7, 0.7, 0.5) == 0);
    CHECK(eclipse_indicator(0.7 + kPi, 0.7, 0.5) == 0);
    CHECK(eclipse_indicator(0.7 + kPi / 2, 0.7, 0.5) == 1);
  }
  SUBCASE("on-measure equals DC' per orbit") {
    for (double dc : {0.3, 0.4, 0.5, 1.0}) {
      for (double l_c : {0.0, 1.3, 5.9}) {
        // Midpoint rule on a fine grid.
        const int n = 2000000;
        long on = 0;
        for (int k = 0; k < n; ++k) on += eclipse_indicator((k + 0.5) * kTwoPi / n, l_c, dc);
        CHECK(std::abs(static_cast<double>(on) / n - dc) < 1e-6);

        // Exact: integrate piecewise between the switch points.
        std::vector<double> cuts{0.0, kTwoPi};
        if (dc < 1.0)
          for (double s : eclipse_switch_points(l_c, dc)) cuts.push_back(s);
        std::sort(cuts.begin(), cuts.end());
        double measure = 0.0;
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
          measure += (cuts[j + 1] - cuts[j]) * eclipse_indicator(0.5 * (cuts[j] + cuts[j + 1]), l_c, dc);
        CHECK(std::abs(measure - dc * kTwoPi) < 1e-9);
      }
    }
  }
  SUBCASE("latitude crossings") {
    const auto c = latitude_crossings(0.0, 1.0, 4.0, {kPi / 2, 3 * kPi / 2});
    REQUIRE(c.size() == 1);
    CHECK(c[0] == doctest::Approx(kPi / 2));
  }
}

TEST_CASE("sun direction at the March 2022 equinox") {
  // Equinox 2022-03-20 15:33 UTC: the Sun crosses the equator heading north.
  // The direction is referred to the J2000 equinox, which precession has
  // moved 0.31 deg westward along the ecliptic by 2022.
  const Vector3 s = sun_direction(julian_date_from_iso("2022-03-20T15:33:00Z"));
  const double dec = -std::asin(std::sin(50.29 / 3600.0 * 22.22 * kDeg) * std::sin(23.439 * kDeg));
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(std::asin(s.z()) - dec) / kDeg < 0.05);
  CHECK(s.x() > 0.99);
  CHECK_THROWS_AS(julian_date_from_iso("2022-13-01T00:00:00Z"), std::invalid_argument);
  CHECK_THROWS_AS(julian_date_from_iso("yesterday"), std::invalid_argument);
}

TEST_CASE("force model") {
  const CounterRng rng(21);
  SUBCASE("two-body limit") {
    for (std::uint64_t k = 0; k < 50; ++k) {
      const CartesianState x = kep_to_cart(test::sample_leo(rng, k), kEarth.mu);
      const Vector3 a = total_acceleration(x, 800.0, Vector3::Zero(), ForceModel::two_body());
      const Vector3 expect = -kEarth.mu * x.r / std::pow(x.r.norm(), 3);
      CHECK((a - expect).norm() / expect.norm() < 1e-15);
    }
  }
  SUBCASE("J2 radial component follows 1 - 3 sin^2(lat)") {
    const double r = 7000.0;
    const double k0 = -1.5 * kEarth.j2 * kEarth.mu * kEarth.radius * kEarth.radius / std::pow(r, 4);
    for (double lat : {0.0, 0.3, 0.7, kPi / 2}) {
      const Vector3 pos(r * std::cos(lat), 0.0, r * std::sin(lat));
      const Vector3 a = j2_acceleration<double>(pos, kEarth);
      const double s2 = std::sin(lat) * std::sin(lat);
      CHECK(a.dot(pos) / r == doctest::Approx(k0 * (1.0 - 3.0 * s2)).epsilon(1e-13));
    }
    const double eq = j2_acceleration<double>(Vector3(r, 0, 0), kEarth).x();
    const double pole = j2_acceleration<double>(Vector3(0, 0, r), kEarth).z();
    CHECK(pole / eq == doctest::Approx(-2.0).epsilon(1e-14));
  }
  SUBCASE("tangential thrust lies along velocity on a circular orbit") {
    const CartesianState x = kep_to_cart({7000.0, 0.0, 0.9, 0.4, 0.0, 1.2}, kEarth.mu);
    const double at = 1e-7;
    const Vector3 diff = total_acceleration(x, 800.0, Vector3(0, at, 0), ForceModel::two_body()) -
                         total_acceleration(x, 800.0, Vector3::Zero(), ForceModel::two_body());
    CHECK(diff.dot(x.v.normalized()) == doctest::Approx(at).epsilon(1e-12));
    const Matrix3 b = rtn_basis(x.r, x.v);
    CHECK((b.transpose() * b - Matrix3::Identity()).norm() < 1e-14);
  }
  SUBCASE("drag opposes the relative wind") {
    const CartesianState x = kep_to_cart({kEarth.radius + 300.0, 0.0, 0.9, 0.4, 0.0, 1.2}, kEarth.mu);
    ForceModel with = ForceModel::j2_only();
    with.drag = true;
    const Vector3 d = total_acceleration(x, 800.0, Vector3::Zero(), with) -
                      total_acceleration(x, 800.0, Vector3::Zero(), ForceModel::j2_only());
    const Vector3 v_rel = x.v - Vector3(0, 0, kEarth.rotation_rate).cross(x.r);
    CHECK(d.normalized().dot(-v_rel.normalized()) == doctest::Approx(1.0).epsilon(1e-12));
    const double rho = harris_priester_density(300.0).rho;
    const double expect = 0.5 * rho * 2.2 * 0.01 / 800.0 * v_rel.squaredNorm() * 1e3;  // km/s^2
    CHECK(d.norm() == doctest::Approx(expect).epsilon(1e-3));
  }
}

TEST_CASE("propagation") {
  const double ve = 1300.0 * kStandardGravity;

  SUBCASE("Kepler closure and energy over one period") {
    const KeplerianElements el{6728.1363, 0.004, 98.3 * kDeg, 15.3 * kDeg, 0.3, 0.1};
    const CartesianState x0 = kep_to_cart(el, kEarth.mu);
    const double period = kTwoPi * std::sqrt(std::pow(el.a, 3) / kEarth.mu);
    const double e0 = orbit_energy(x0, kEarth.mu);
    double worst_energy = 0.0;
    const PropagationResult r =
        propagate_arc(x0, 800.0, {period, Vector3::Zero(), 0.0}, ForceModel::two_body(), ve, {},
                      [&](double, const CartesianState& x, double) {
                        worst_energy = std::max(worst_energy, std::abs(orbit_energy(x, kEarth.mu) / e0 - 1.0));
                      });
    CHECK((r.x.r - x0.r).norm() / x0.r.norm() < 1e-8);
    CHECK((r.x.v - x0.v).norm() / x0.v.norm() < 1e-8);
    CHECK(worst_energy < 1e-10);
    CHECK(r.m == 800.0);
    CHECK(r.x.epoch == doctest::Approx(x0.epoch + period));
  }

  SUBCASE("tangential thrust raises a as the Gauss equations predict") {
    const Json o = test::load_json("reference_values.json")["gve_transverse_one_orbit"];
    const double a0 = o["a"].get<double>();
    const CartesianState x0 = kep_to_cart({a0, o["e"].get<double>(), 0.5, 0.2, 0.0, 0.0}, kEarth.mu);
    ThrustArc arc{o["t"].get<double>(), Vector3(0, o["accel"].get<double>(), 0), 1.0, ThrustFrame::rotating};
    const PropagationResult r = propagate_arc(x0, 643.0, arc, ForceModel::two_body(), ve);
    const double da = cart_to_kep(r.x, kEarth.mu).a - a0;
    CHECK(da > 0.0);
    CHECK(std::abs(da / o["da"].get<double>() - 1.0) < 1e-3);
    // Constant acceleration: dm/dt = -m a / ve.
    CHECK(r.m == doctest::Approx(643.0 * std::exp(-arc.a_rtn.norm() * 1e3 * arc.dt / ve)).epsilon(1e-9));
  }

  SUBCASE("no thrust, no mass flow") {
    const CartesianState x0 = kep_to_cart({6800.0, 0.001, 1.0, 0.0, 0.0, 0.0}, kEarth.mu);
    const PropagationResult coast = propagate_arc(x0, 800.0, {3000.0, Vector3(0, 1e-7, 0), 0.0}, ForceModel{}, ve);
    CHECK(coast.m == 800.0);
    const PropagationResult burn = propagate_arc(x0, 800.0, {3000.0, Vector3(0, 1e-7, 0), 1.0}, ForceModel{}, ve);
    CHECK(burn.m < 800.0);
  }

  SUBCASE("zero-order hold chain equals a single arc") {
    const CartesianState x0 = kep_to_cart({6800.0, 0.001, 1.0, 0.0, 0.0, 0.0}, kEarth.mu);
    const std::vector<ThrustArc> arcs(2, ThrustArc{1000.0, Vector3::Zero(), 0.0});
    const PropagationResult two = propagate(x0, 800.0, arcs, ForceModel{}, ve);
    const PropagationResult one = propagate_arc(x0, 800.0, {2000.0, Vector3::Zero(), 0.0}, ForceModel{}, ve);
    CHECK((two.x.r - one.x.r).norm() < 1e-6);
  }

  SUBCASE("reentry surfaces with the last good state") {
    const CartesianState x0 = kep_to_cart({kEarth.radius + 100.0, 0.0, 0.5, 0.0, 0.0, 0.0}, kEarth.mu);
    try {
      propagate_arc(x0, 800.0, {4000.0, Vector3(-1e-3, 0, 0), 1.0, ThrustFrame::rotating}, ForceModel{}, ve);
      FAIL("expected a PropagationError");
    } catch (const PropagationError& e) {
      CHECK(e.last_state.r.norm() > kEarth.radius);
      CHECK(e.mass > 0.0);
    }
  }
}

TEST_CASE("GEqOE state transition matrices") {
  const double ve = 1300.0 * kStandardGravity;
  const ForceModel model = ForceModel::for_spacecraft(SpacecraftConfig{});

  SUBCASE("identity as dt goes to zero") {
    const CartesianState x = kep_to_cart({6800.0, 0.002, 1.7, 0.3, 0.2, 0.4}, kEarth.mu);
    const Vector6 xs = geqoe_scaled(cart_to_geqoe(x, kEarth), kEarth);
    // dL/dnu is dt in canonical time, so the departure from I shrinks with dt.
    for (double dt : {1e-6, 1e-8}) {
      const double tau = dt / kEarth.time_unit();
      const ThrustArc arc{dt, Vector3(0, 5e-8, 0), 1.0};
      const StmPair s = compute_stm_on_steps(xs, 800.0, arc, model, ve, {dt});
      CHECK(max_abs(s.a_mat - Matrix6::Identity()) < std::max(1.1 * tau, 1e-10));
      CHECK(max_abs(s.b_mat) < std::max(4.0 * tau, 1e-10));
    }
  }

  SUBCASE("nu row without J2 or drag") {
    const CartesianState x = kep_to_cart({6800.0, 0.002, 1.7, 0.3, 0.2, 0.4}, kEarth.mu);
    const ForceModel kepler = ForceModel::two_body();
    const Vector6 xs = geqoe_scaled(cart_to_geqoe(x, kepler.grav), kepler.grav);
    const StmPair s = compute_stm(xs, 800.0, {600.0, Vector3::Zero(), 0.0}, kepler, ve);
    Vector6 e0 = Vector6::Zero();
    e0[0] = 1.0;
    CHECK((s.a_mat.row(0).transpose() - e0).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("finite-difference agreement on 100 random nodes") {
    const CounterRng rng(22);
    double worst_a = 0.0, worst_b = 0.0, worst_lin = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      KeplerianElements el = test::sample_leo(rng, k);
      el.e *= 0.2;
      const CartesianState x = kep_to_cart(el, kEarth.mu);
      const double period = kTwoPi * std::sqrt(std::pow(el.a, 3) / kEarth.mu);
      const double mag = 7.5e-8 * rng.uniform(k, 6, 0);
      const double ang = kTwoPi * rng.uniform(k, 7, 0);
      const ThrustArc arc{period / 36.0, mag * Vector3(0.1, std::cos(ang), std::sin(ang)), 1.0};
      const Vector6 xs = geqoe_scaled(cart_to_geqoe(x, kEarth), kEarth);
      const std::vector<double> steps = propagate_arc(x, 800.0, arc, model, ve).steps;
      const StmPair s = compute_stm_on_steps(xs, 800.0, arc, model, ve, steps);

      // Oracle: central differences at 1e-6 and 1e-7, taking the closer one per column.
      Matrix6 a_fd;
      Matrix63 b_fd;
      for (int j = 0; j < 6; ++j) {
        Vector6 best;
        double best_err = 1e300;
        for (double h : {1e-6, 1e-7}) {
          Vector6 xp = xs, xm = xs;
          xp[j] += h;
          xm[j] -= h;
          const Vector6 col = geqoe_scaled_difference(geqoe_step(xp, 800.0, arc, model, ve, steps),
                                                      geqoe_step(xm, 800.0, arc, model, ve, steps)) /
                              (2 * h);
          const double err = (col - s.a_mat.col(j)).cwiseAbs().maxCoeff();
          if (err < best_err) best_err = err, best = col;
        }
        a_fd.col(j) = best;
      }
      const double ha = 1e-7 * kEarth.accel_unit();
      for (int j = 0; j < 3; ++j) {
        ThrustArc ap = arc, am = arc;
        ap.a_rtn[j] += ha;
        am.a_rtn[j] -= ha;
        b_fd.col(j) = geqoe_scaled_difference(geqoe_step(xs, 800.0, ap, model, ve, steps),
                                              geqoe_step(xs, 800.0, am, model, ve, steps)) /
                      2e-7;
      }
      worst_a = std::max(worst_a, max_abs(s.a_mat - a_fd) / max_abs(a_fd));
      worst_b = std::max(worst_b, max_abs(s.b_mat - b_fd) / max_abs(b_fd));

      // Linearisation error for a 1e-6 relative perturbation.
      Vector6 dx;
      for (int j = 0; j < 6; ++j) dx[j] = 1e-6 * std::max(std::abs(xs[j]), 1e-2) * rng.normal(k, 8 + j, 0);
      const Vector6 f0 = geqoe_step(xs, 800.0, arc, model, ve, steps);
      const Vector6 f1 = geqoe_step(xs + dx, 800.0, arc, model, ve, steps);
      worst_lin = std::max(worst_lin, (geqoe_scaled_difference(f1, f0) - s.a_mat * dx).norm() / dx.norm());
    }
    MESSAGE("STM vs FD: A " << worst_a << ", B " << worst_b << ", linearisation " << worst_lin);
    CHECK(worst_a < 1e-4);
    CHECK(worst_b < 1e-4);
    CHECK(worst_lin < 1e-3);
  }
}
