#include "doctest.h"
#include "test_support.hpp"

#include "ltmpc/dynamics.hpp"
#include "ltmpc/geqoe.hpp"
#include "ltmpc/gravity.hpp"
#include "ltmpc/mean_elements.hpp"

using namespace ltmpc;

namespace {

const Gravity kEarth;

double cart_rel_error(const CartesianState& a, const CartesianState& b) {
  return std::max((a.r - b.r).norm() / b.r.norm(), (a.v - b.v).norm() / b.v.norm());
}

}  // namespace

TEST_CASE("up-leg initial state converts both ways") {
  const Json oracle = test::load_json("reference_values.json")["upleg_initial_cartesian"];
  const KeplerianElements el{6728.1363, 0.004, 98.3 * kDeg, 15.3 * kDeg, 0.0, 0.0};
  const CartesianState x = kep_to_cart(el, kEarth.mu);
  for (int k = 0; k < 3; ++k) {
    CHECK(x.r[k] == doctest::Approx(oracle["r"][k].get<double>()).epsilon(1e-12));
    CHECK(x.v[k] == doctest::Approx(oracle["v"][k].get<double>()).epsilon(1e-12));
  }
  const KeplerianElements back = cart_to_kep(x, kEarth.mu);
  CHECK(back.a == doctest::Approx(6728.1363).epsilon(1e-12));
  CHECK(back.e == doctest::Approx(0.004).epsilon(1e-9));
  CHECK(back.i / kDeg == doctest::Approx(98.3).epsilon(1e-12));
  CHECK(back.raan / kDeg == doctest::Approx(15.3).epsilon(1e-12));
  CHECK(std::abs(wrap_pi(back.argp + back.ta)) < 1e-10);
}

TEST_CASE("circular equatorial orbit") {
  CartesianState x;
  x.r = Vector3(7000.0, 0.0, 0.0);
  x.v = Vector3(0.0, std::sqrt(kEarth.mu / 7000.0), 0.0);
  const KeplerianElements el = cart_to_kep(x, kEarth.mu);
  CHECK(el.a == doctest::Approx(7000.0).epsilon(1e-12));
  CHECK(el.e < 1e-12);
  CHECK(el.i < 1e-12);
}

TEST_CASE("Keplerian round trip on 1000 LEO states") {
  const CounterRng rng(11);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const CartesianState x = kep_to_cart(test::sample_leo(rng, k), kEarth.mu);
    worst = std::max(worst, cart_rel_error(kep_to_cart(cart_to_kep(x, kEarth.mu), kEarth.mu), x));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("angles come out in [0, 2pi)") {
  const CounterRng rng(12);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const KeplerianElements el = cart_to_kep(kep_to_cart(test::sample_leo(rng, k), kEarth.mu), kEarth.mu);
    for (double ang : {el.raan, el.argp, el.ta}) {
      CHECK(ang >= 0.0);
      CHECK(ang < kTwoPi);
    }
    const EquinoctialElements eq = kep_to_equinoctial(el);
    CHECK(eq.L >= 0.0);
    CHECK(eq.L < kTwoPi);
  }
}

TEST_CASE("equinoctial elements") {
  SUBCASE("circular orbit has f = g = 0") {
    const EquinoctialElements eq = kep_to_equinoctial({7000.0, 0.0, 0.5, 1.0, 0.3, 0.2});
    CHECK(eq.f == 0.0);
    CHECK(eq.g == 0.0);
  }
  SUBCASE("equatorial orbit has h = k = 0") {
    const EquinoctialElements eq = kep_to_equinoctial({7000.0, 0.01, 0.0, 0.0, 0.3, 0.2});
    CHECK(eq.h == 0.0);
    CHECK(eq.k == 0.0);
  }
  SUBCASE("H-2A target values and round trip") {
    const Json o = test::load_json("reference_values.json")["target_equinoctial"];
    const KeplerianElements el{6975.0874, 0.0040111, 98.1521 * kDeg, 19.9669 * kDeg, 0.0, 0.0};
    const EquinoctialElements eq = kep_to_equinoctial(el);
    CHECK(eq.p == doctest::Approx(o["p"].get<double>()).epsilon(1e-14));
    CHECK(eq.f == doctest::Approx(o["f"].get<double>()).epsilon(1e-13));
    CHECK(eq.g == doctest::Approx(o["g"].get<double>()).epsilon(1e-13));
    CHECK(eq.h == doctest::Approx(o["h"].get<double>()).epsilon(1e-14));
    CHECK(eq.k == doctest::Approx(o["k"].get<double>()).epsilon(1e-14));
    CHECK(eq.L == doctest::Approx(o["L"].get<double>()).epsilon(1e-14));
    const KeplerianElements back = equinoctial_to_kep(eq);
    CHECK(std::abs(back.a - el.a) / el.a < 1e-12);
    CHECK(std::abs(back.e - el.e) < 1e-12);
    CHECK(std::abs(back.i - el.i) < 1e-12);
    CHECK(std::abs(wrap_pi(back.raan - el.raan)) < 1e-12);
    CHECK(std::abs(wrap_pi(back.argp + back.ta - el.argp - el.ta)) < 1e-12);
  }
  SUBCASE("round trips on sampled states") {
    const CounterRng rng(13);
    double worst_kep = 0.0, worst_cart = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const KeplerianElements el = test::sample_leo(rng, k);
      const KeplerianElements back = equinoctial_to_kep(kep_to_equinoctial(el));
      worst_kep = std::max({worst_kep, std::abs(back.a - el.a) / el.a, std::abs(back.e - el.e),
                            std::abs(back.i - el.i), std::abs(wrap_pi(back.raan - el.raan)),
                            std::abs(wrap_pi(back.argp + back.ta - el.argp - el.ta))});
      const CartesianState x = kep_to_cart(el, kEarth.mu);
      worst_cart = std::max(worst_cart, cart_rel_error(equinoctial_to_cart(cart_to_equinoctial(x, kEarth.mu),
                                                                           kEarth.mu),
                                                       x));
      const CartesianState y = classical_equinoctial_to_cart(cart_to_classical_equinoctial(x, kEarth.mu), kEarth.mu);
      worst_cart = std::max(worst_cart, cart_rel_error(y, x));
    }
    CHECK(worst_kep < 1e-12);
    CHECK(worst_cart < 1e-9);
  }
}

TEST_CASE("mean elements") {
  const KeplerianElements osc{6728.1363, 0.004, 98.3 * kDeg, 15.3 * kDeg, 0.0, 0.0};

  SUBCASE("identity without J2") {
    const KeplerianElements m = osc_to_mean(osc, Gravity::two_body());
    CHECK(m.a == doctest::Approx(osc.a).epsilon(1e-13));
    CHECK(m.e == doctest::Approx(osc.e).epsilon(1e-12));
    CHECK(m.i == doctest::Approx(osc.i).epsilon(1e-13));
    CHECK(std::abs(wrap_pi(m.raan - osc.raan)) < 1e-13);
  }

  SUBCASE("mean a agrees with the time average of one J2 orbit") {
    const KeplerianElements mean = osc_to_mean(osc, kEarth);
    CHECK(std::abs(mean.a - osc.a) <= 10.0);
    CHECK(std::abs(mean.a - osc.a) > 0.1);  // J2 short-period terms are not negligible

    // Oracle: trapezoidal average of the osculating elements over one
    // nodal period of J2-only motion, on a fine fixed grid.
    const CartesianState x0 = kep_to_cart(osc, kEarth.mu);
    const double period = kTwoPi / j2_latitude_rate(mean.a, mean.i, kEarth, mean.e);
    const int n = 2000;
    CartesianState x = x0;
    double sum_a = 0.0, sum_i = 0.0;
    for (int k = 0; k <= n; ++k) {
      const KeplerianElements el = cart_to_kep(x, kEarth.mu);
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      sum_a += w * el.a;
      sum_i += w * el.i;
      if (k < n) x = propagate_arc(x, 800.0, {period / n, Vector3::Zero(), 0.0}, ForceModel::j2_only(), 1e4).x;
    }
    CHECK(std::abs(sum_a / n - mean.a) < 0.05);       // km
    CHECK(std::abs(sum_i / n - mean.i) / kDeg < 2e-4);  // deg
  }

  SUBCASE("round trip on 100 LEO states") {
    const CounterRng rng(14);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      KeplerianElements el = test::sample_leo(rng, k);
      el.e *= 0.5;  // mean-element theory is for near-circular orbits
      const KeplerianElements back = mean_to_osc(osc_to_mean(el, kEarth), kEarth);
      const CartesianState a = kep_to_cart(el, kEarth.mu), b = kep_to_cart(back, kEarth.mu);
      worst = std::max(worst, cart_rel_error(b, a));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("GEqOE") {
  SUBCASE("reduces to equinoctial quantities without J2") {
    const Gravity g = Gravity::two_body();
    const KeplerianElements el{7000.0, 0.01, 0.9, 1.1, 0.4, 2.0};
    const GEqOEState s = cart_to_geqoe(kep_to_cart(el, g.mu), g);
    const EquinoctialElements eq = kep_to_equinoctial(el);
    CHECK(s.nu == doctest::Approx(std::sqrt(g.mu / (el.a * el.a * el.a))).epsilon(1e-12));
    CHECK(s.p1 == doctest::Approx(eq.g).epsilon(1e-10));
    CHECK(s.p2 == doctest::Approx(eq.f).epsilon(1e-10));
    CHECK(s.q1 == doctest::Approx(std::tan(el.i / 2) * std::sin(el.raan)).epsilon(1e-12));
    CHECK(s.q2 == doctest::Approx(std::tan(el.i / 2) * std::cos(el.raan)).epsilon(1e-12));
  }

  SUBCASE("round trip with J2 and the inclination vector identity") {
    const CounterRng rng(15);
    double worst = 0.0, worst_q = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      const KeplerianElements el = test::sample_leo(rng, k);
      const CartesianState x = kep_to_cart(el, kEarth.mu);
      const GEqOEState s = cart_to_geqoe(x, kEarth);
      worst = std::max(worst, (geqoe_to_cart(s, kEarth).r - x.r).norm());
      const double t2 = std::tan(el.i / 2) * std::tan(el.i / 2);
      worst_q = std::max(worst_q, std::abs(s.q1 * s.q1 + s.q2 * s.q2 - t2) / std::max(1.0, t2));
      CHECK(s.L_gen >= 0.0);
      CHECK(s.L_gen < kTwoPi);
    }
    CHECK(worst < 1e-3);  // km
    CHECK(worst_q < 1e-10);
  }

  SUBCASE("nu is conserved under J2-only motion") {
    const KeplerianElements el{kEarth.radius + 350.0, 0.0, 99.22 * kDeg, 0.3, 0.0, 0.0};
    const CartesianState x0 = kep_to_cart(el, kEarth.mu);
    const double nu0 = cart_to_geqoe(x0, kEarth).nu;
    const double period = kTwoPi * std::sqrt(el.a * el.a * el.a / kEarth.mu);
    double worst = 0.0;
    propagate_arc(x0, 800.0, {15.0 * period, Vector3::Zero(), 0.0}, ForceModel::j2_only(), 1e4, {},
                  [&](double, const CartesianState& x, double) {
                    worst = std::max(worst, std::abs(cart_to_geqoe(x, kEarth).nu / nu0 - 1.0));
                  });
    CHECK(worst < 1e-8);
  }
}
