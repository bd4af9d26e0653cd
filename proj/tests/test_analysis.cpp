#include "doctest.h"
#include "test_support.hpp"

#include "ltmpc/analysis.hpp"
#include "ltmpc/plot.hpp"

using namespace ltmpc;
namespace fs = std::filesystem;

namespace {

const Gravity kEarth;

CartesianState upleg_start() {
  return kep_to_cart({6728.1363, 0.004, 98.3 * kDeg, 15.3 * kDeg, 0.0, 0.0}, kEarth.mu);
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t at = text.find(what); at != std::string::npos; at = text.find(what, at + 1)) ++n;
  return n;
}

// A made-up log on a slowly rising circular orbit with a few recomputations.
GuidanceLog synthetic_log() {
  GuidanceLog log;
  log.scenario = "synthetic";
  for (int k = 0; k <= 40; ++k) {
    NodeRecord n;
    n.t = 3600.0 * k;
    n.x = kep_to_cart({6728.0 + 0.5 * k, 0.001, 98.3 * kDeg, 15.3 * kDeg, 0.0, 0.3 * k}, kEarth.mu, n.t);
    n.m = 800.0 - 0.01 * k;
    n.dv_cum = 0.2 * k;
    log.nodes.push_back(n);
  }
  for (int s = 0; s < 8; ++s) {
    SegmentRecord r;
    r.index = s;
    r.t0 = 18000.0 * s;
    r.tf = 18000.0 * (s + 1);
    r.status = "optimal";
    r.dv_prime = 1.0 + 0.3 * s;
    r.recompute = r.dv_prime > 2.0;
    if (r.recompute) log.recompute_times.push_back(r.tf);
    log.segments.push_back(r);
  }
  log.recomputations = static_cast<int>(log.recompute_times.size());
  return log;
}

}  // namespace

TEST_CASE("coordinate jacobians") {
  const CounterRng rng(71);
  const double du = kEarth.radius, vu = kEarth.velocity_unit();
  for (std::uint64_t k = 0; k < 20; ++k) {
    const CartesianState x = kep_to_cart(test::sample_leo(rng, k), kEarth.mu);
    CHECK((coordinate_jacobian(CoordinateSystem::cartesian, x, kEarth) - Matrix6::Identity()).cwiseAbs().maxCoeff() <
          1e-8);

    // Semi-major axis row from the energy equation, canonical units (mu = 1).
    const Vector3 r = x.r / du, v = x.v / vu;
    const double a = 1.0 / (2.0 / r.norm() - v.squaredNorm());
    Vector6 row;
    row << 2.0 * a * a * r / std::pow(r.norm(), 3), 2.0 * a * a * v;
    for (CoordinateSystem c : {CoordinateSystem::keplerian, CoordinateSystem::classical_equinoctial}) {
      const Matrix6 j = coordinate_jacobian(c, x, kEarth);
      CHECK((j.row(0).transpose() - row).norm() / row.norm() < 1e-7);
    }
    for (CoordinateSystem c : kCoordinateSystems) {
      CAPTURE(to_string(c));
      CHECK(std::abs(coordinate_jacobian(c, x, kEarth).determinant()) > 1e-12);
    }
  }
}

TEST_CASE("J2 variational STM matches finite differences") {
  const CartesianState x0 = upleg_start();
  const double period = kTwoPi * std::sqrt(std::pow(cart_to_kep(x0, kEarth.mu).a, 3) / kEarth.mu);
  const auto nominal = j2_stm_per_orbit(x0, 2, kEarth, period);
  REQUIRE(nominal.size() == 2);
  CHECK(nominal[1].first.epoch == doctest::Approx(x0.epoch + 2 * period).epsilon(1e-12));

  const double du = kEarth.radius, vu = kEarth.velocity_unit();
  const Vector6 scale = (Vector6() << Vector3::Constant(du), Vector3::Constant(vu)).finished();
  const double h = 1e-6;
  Matrix6 fd;
  for (int k = 0; k < 6; ++k) {
    Vector6 xp = x0.to_vector(), xm = xp;
    xp[k] += h * scale[k];
    xm[k] -= h * scale[k];
    const auto p = j2_stm_per_orbit(CartesianState::from_vector(xp, x0.epoch), 2, kEarth, period);
    const auto m = j2_stm_per_orbit(CartesianState::from_vector(xm, x0.epoch), 2, kEarth, period);
    fd.col(k) = (p[1].first.to_vector() - m[1].first.to_vector()).cwiseQuotient(scale) / (2 * h);
  }
  const Matrix6& phi = nominal[1].second;
  CHECK((fd - phi).norm() / phi.norm() < 1e-6);
  // Symplectic: det = 1.
  CHECK(phi.determinant() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("nonlinearity index") {
  const CartesianState x0 = upleg_start();
  NonlinearityOptions o;
  o.orbits = 15;
  o.samples = 8;
  o.seed = 3;

  SUBCASE("zero uncertainty gives zero") {
    NonlinearityOptions z = o;
    z.orbits = 2;
    z.sigma_r = z.sigma_v = 0.0;
    const NonlinearityReport r = nonlinearity_index(x0, z, kEarth);
    for (const auto& v : r.index)
      for (double x : v) CHECK(x == 0.0);
  }

  SUBCASE("grows with the uncertainty, GEqOE is the most linear") {
    const NonlinearityReport r1 = nonlinearity_index(x0, o, kEarth);
    NonlinearityOptions big = o;
    big.sigma_r *= 2.0;
    big.sigma_v *= 2.0;
    const NonlinearityReport r2 = nonlinearity_index(x0, big, kEarth);
    REQUIRE(r1.orbits.size() == 15);
    for (std::size_t s = 0; s < 5; ++s)
      for (std::size_t k = 0; k < 15; ++k) {
        CHECK(r1.index[s][k] > 0.0);
        CHECK(r2.index[s][k] >= r1.index[s][k]);
      }
    for (int n : {5, 10, 15}) {
      const double g = r1.at(CoordinateSystem::geqoe, n);
      MESSAGE("orbit " << n << ": cartesian " << r1.at(CoordinateSystem::cartesian, n) << ", keplerian "
                       << r1.at(CoordinateSystem::keplerian, n) << ", geqoe " << g);
      for (CoordinateSystem c : kCoordinateSystems)
        if (c != CoordinateSystem::geqoe) CHECK(g < r1.at(c, n));
    }
    CHECK_THROWS_AS(r1.at(CoordinateSystem::geqoe, 16), std::out_of_range);

    const std::string csv = nonlinearity_to_csv(r1);
    CHECK(csv.rfind("orbits,cartesian,keplerian,classical_equinoctial,modified_equinoctial,geqoe\n", 0) == 0);
    CHECK(count(csv, "\n") == 16);
    const Json j = nonlinearity_to_json(r1);
    CHECK(j["norm"] == "2-norm");
    CHECK(j["index"]["geqoe"].size() == 15);
    CHECK(nonlinearity_svg(r1) == nonlinearity_svg(r1));
  }

  SUBCASE("input checks") {
    NonlinearityOptions bad = o;
    bad.samples = 7;
    CHECK_THROWS_AS(nonlinearity_index(x0, bad, kEarth), std::invalid_argument);
    bad = o;
    bad.orbits = 0;
    CHECK_THROWS_AS(nonlinearity_index(x0, bad, kEarth), std::invalid_argument);
  }
}

TEST_CASE("plots") {
  const fs::path dir = fs::temp_directory_path() / "ltmpc_plot_test";
  fs::remove_all(dir);
  const GuidanceLog log = synthetic_log();
  REQUIRE(log.recomputations > 0);

  const auto files = emit_plots(log, nullptr, dir);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == kElementsPlot);
  CHECK(files[1].filename() == kTrackingPlot);
  const std::string tracking = read_text(files[1]);
  CHECK(count(tracking, "class=\"recompute\"") == log.recompute_times.size());
  CHECK(tracking.rfind("<svg", 0) == 0);

  // Byte-identical on a second pass.
  const std::string elements = read_text(files[0]);
  emit_plots(log, nullptr, dir);
  CHECK(read_text(files[0]) == elements);
  CHECK(read_text(files[1]) == tracking);

  GuidanceLog empty = log;
  empty.segments.clear();
  try {
    emit_plots(empty, nullptr, dir);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "log has no segments; nothing to plot");
  }
  fs::remove_all(dir);
}

TEST_CASE("sweep tables") {
  std::vector<SweepPoint> points(3);
  points[0] = {0.3, true, "", 70.0, 70.5, 150.0, 151.0, 0};
  points[1] = {0.4, true, "", 60.0, 60.2, 148.0, 149.4, 1};
  points[2] = {0.6, false, "DC' must lie in (0, DC]", 0, 0, 0, 0, 0};
  const std::string csv = sweep_to_csv(points);
  CHECK(csv.rfind("dc_ref,ok,ref_tof_d,tof_d,ref_dv_ms,dv_ms,recomputations,error\n", 0) == 0);
  CHECK(count(csv, "\n") == 4);
  CHECK(csv.find("0.4,1,60,60.2,148,149.4,1,\n") != std::string::npos);
  const Json j = sweep_to_json(points);
  CHECK(j["points"].size() == 3);
  CHECK(j["points"][2]["ok"] == false);
  CHECK(sweep_svg(points).rfind("<svg", 0) == 0);

  // Out-of-range values are recorded, not thrown.
  const Scenario sc = load_scenario(test::scenario_dir() / "downleg_short_noerr.json").scenario;
  const auto out = dcprime_sweep(sc, {0.0, sc.sc.duty_cycle + 0.1});
  REQUIRE(out.size() == 2);
  for (const SweepPoint& p : out) {
    CHECK_FALSE(p.ok);
    CHECK(p.error == "DC' must lie in (0, DC]");
  }
}
