// Acceptance suite: one PASS/FAIL line per check. --ci swaps the long
// scenarios for their reduced-grid variants.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>

#include "CLI11.hpp"
#include "ltmpc/analysis.hpp"
#include "ltmpc/eclipse.hpp"
#include "ltmpc/geqoe.hpp"
#include "ltmpc/mean_elements.hpp"
#include "ltmpc/stm.hpp"

namespace fs = std::filesystem;
using namespace ltmpc;

namespace {

const Gravity kEarth;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

bool within(double value, double expect, double frac) { return std::abs(value - expect) <= frac * std::abs(expect); }

KeplerianElements sample_leo(const CounterRng& rng, std::uint64_t k) {
  KeplerianElements el;
  el.a = 6578.0 + 1000.0 * rng.uniform(k, 0, 0);
  el.e = 0.05 * rng.uniform(k, 1, 0);
  el.i = 0.01 + (kPi - 0.02) * rng.uniform(k, 2, 0);
  el.raan = kTwoPi * rng.uniform(k, 3, 0);
  el.argp = kTwoPi * rng.uniform(k, 4, 0);
  el.ta = kTwoPi * rng.uniform(k, 5, 0);
  return el;
}

double cart_rel(const CartesianState& a, const CartesianState& b) {
  return std::max((a.r - b.r).norm() / b.r.norm(), (a.v - b.v).norm() / b.v.norm());
}

struct Context {
  fs::path scenarios;
  fs::path data;
  bool ci = false;

  Scenario scenario(const std::string& name) const {
    return load_scenario(scenarios / (name + ".json")).scenario;
  }
  // Reduced grid used by the CI variants.
  static void shrink(Scenario& sc) {
    sc.guidance.segment.nodes_per_orbit = 18;
    sc.guidance.segment.n_orbits = 3;
  }
};

GuidanceLog fly(const Scenario& sc) {
  try {
    return run_guidance(sc);
  } catch (const GuidanceFailure& e) {
    return e.log;
  }
}

// Terminal tolerances shared by criteria 5 and 7.
bool terminal_ok(const TerminalSummary& s) {
  return std::abs(s.da) < 1.0 && std::abs(s.di) < 0.005 && std::abs(s.draan) < 0.01 && s.dv_prime < 0.5;
}

std::string terminal_text(const TerminalSummary& s) {
  return fmt("da %.4f km, di %.5f deg, dRAAN %.5f deg, dv' %.4f m/s", s.da, s.di, s.draan, s.dv_prime);
}

// ---------------------------------------------------------------------------

Outcome c1_round_trips(const Context&) {
  const CounterRng rng(1001);
  double cart = 0.0, eq_kep = 0.0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const KeplerianElements el = sample_leo(rng, k);
    const CartesianState x = kep_to_cart(el, kEarth.mu);
    cart = std::max(cart, cart_rel(kep_to_cart(cart_to_kep(x, kEarth.mu), kEarth.mu), x));
    cart = std::max(cart, cart_rel(equinoctial_to_cart(cart_to_equinoctial(x, kEarth.mu), kEarth.mu), x));
    cart = std::max(cart, cart_rel(classical_equinoctial_to_cart(cart_to_classical_equinoctial(x, kEarth.mu),
                                                                 kEarth.mu),
                                   x));
    cart = std::max(cart, cart_rel(geqoe_to_cart(cart_to_geqoe(x, kEarth), kEarth), x));

    for (const KeplerianElements& back :
         {equinoctial_to_kep(kep_to_equinoctial(el)), classical_equinoctial_to_kep(kep_to_classical_equinoctial(el))}) {
      eq_kep = std::max({eq_kep, std::abs(back.a - el.a) / el.a, std::abs(back.e - el.e), std::abs(back.i - el.i),
                         std::abs(wrap_pi(back.raan - el.raan)),
                         std::abs(wrap_pi(back.argp + back.ta - el.argp - el.ta))});
    }
  }
  return {cart <= 1e-9 && eq_kep <= 1e-12,
          fmt("1000 states: Cartesian %.2e (<= 1e-9), equinoctial<->Keplerian %.2e (<= 1e-12)", cart, eq_kep)};
}

Outcome c2_nu_conservation(const Context& ctx) {
  const CartesianState x0 = kep_to_cart(ctx.scenario("nonlinearity_350km").initial, kEarth.mu);
  const double a = cart_to_kep(x0, kEarth.mu).a;
  const double period = kTwoPi * std::sqrt(a * a * a / kEarth.mu);
  const double nu0 = cart_to_geqoe(x0, kEarth).nu;
  double worst = 0.0;
  propagate_arc(x0, 800.0, {15.0 * period, Vector3::Zero(), 0.0}, ForceModel::j2_only(), 1e4, {},
                [&](double, const CartesianState& x, double) {
                  worst = std::max(worst, std::abs(cart_to_geqoe(x, kEarth).nu / nu0 - 1.0));
                });
  return {worst < 1e-8, fmt("15 orbits J2-only: max |nu/nu0 - 1| = %.2e (< 1e-8)", worst)};
}

Outcome c3_nonlinearity(const Context& ctx) {
  const Scenario sc = ctx.scenario("nonlinearity_350km");
  NonlinearityOptions o;
  o.orbits = 15;
  o.samples = 16;
  o.seed = sc.guidance.errors.seed;
  const NonlinearityReport r = nonlinearity_index(kep_to_cart(sc.initial, kEarth.mu), o, kEarth);
  bool ok = true;
  std::string text;
  for (int n : {5, 10, 15}) {
    const double g = r.at(CoordinateSystem::geqoe, n);
    double next = INFINITY;
    for (CoordinateSystem c : kCoordinateSystems)
      if (c != CoordinateSystem::geqoe) next = std::min(next, r.at(c, n));
    ok = ok && g < next;
    text += fmt("%s%d orbits GEqOE %.2e vs next %.2e", text.empty() ? "" : "; ", n, g, next);
  }
  return {ok, text};
}

Outcome c4_edelbaum(const Context& ctx) {
  const Scenario sc = ctx.scenario("upleg_fuel_noerr");
  const EdelbaumTransfer e = edelbaum_transfer(sc.initial.a, sc.initial.i, sc.target.a_f, *sc.target.i_f, sc.sc,
                                               sc.guidance.dc_ref, sc.sc.m0);
  return {e.dv >= 126.0 && e.dv <= 149.0, fmt("dv %.3f m/s in [126, 149]", e.dv)};
}

Outcome c5_upleg(const Context& ctx) {
  const Scenario sc = ctx.scenario(ctx.ci ? "upleg_fuel_noerr_ci" : "upleg_fuel_noerr");
  const GuidanceLog log = fly(sc);
  const double tol = ctx.ci ? 0.12 : 0.10;
  const TerminalSummary& s = log.summary;
  const bool ok = !log.aborted && within(s.dv, 151.997, tol) && within(s.tof, 60.1721, 0.15) && terminal_ok(s);
  return {ok, fmt("%s: dv %.3f m/s (151.997 +-%.0f%%), TOF %.3f d (60.172 +-15%%), ", sc.name.c_str(), s.dv,
                  tol * 100, s.tof) +
                  terminal_text(s)};
}

Outcome c6_error_cost(const Context& ctx) {
  const char* levels[3] = {"noerr", "lowerr", "higherr"};
  const double published[3] = {151.997, 152.613, 153.198};
  double mean[3] = {};
  bool ok = true;
  std::string text;
  for (int l = 0; l < 3; ++l) {
    Scenario sc = ctx.scenario(std::string("upleg_fuel_") + levels[l] + (ctx.ci ? "_ci" : ""));
    // Without errors the seed changes nothing, so one run stands for all three.
    const int seeds = l == 0 ? 1 : 3;
    for (int seed = 1; seed <= seeds; ++seed) {
      sc.guidance.errors.seed = static_cast<std::uint64_t>(seed);
      const GuidanceLog log = fly(sc);
      ok = ok && !log.aborted;
      mean[l] += log.summary.dv / seeds;
    }
    ok = ok && within(mean[l], published[l], 0.10);
    text += fmt("%s%s %.3f", text.empty() ? "" : ", ", levels[l], mean[l]);
  }
  ok = ok && mean[0] <= mean[1] && mean[1] <= mean[2];
  return {ok, "mean dv (m/s, 3 seeds): " + text + " ; ordered and each within 10% of 151.997/152.613/153.198"};
}

Outcome c7_misthrust(const Context& ctx) {
  Scenario sc = ctx.scenario("upleg_misthrust_higherr");
  if (ctx.ci) {
    // Same outage length in orbits on the shorter CI segments.
    const int orbits_off = sc.guidance.forced_misthrust_segments * sc.guidance.segment.n_orbits;
    Context::shrink(sc);
    const int n = sc.guidance.segment.n_orbits;
    sc.guidance.forced_misthrust_segments = (orbits_off + n - 1) / n;
  }
  const GuidanceLog log = fly(sc);
  const bool ok = !log.aborted && log.recomputations >= 1 && terminal_ok(log.summary);
  return {ok, fmt("%d forced segments of %d orbits: %d recomputations, dv %.3f m/s, ", sc.guidance.forced_misthrust_segments,
                  sc.guidance.segment.n_orbits, log.recomputations, log.summary.dv) +
                  terminal_text(log.summary)};
}

Outcome c8_downleg(const Context& ctx) {
  bool ok = true;
  std::string text;
  if (!ctx.ci) {
    const GuidanceLog log = fly(ctx.scenario("downleg_fuel_noerr"));
    ok = !log.aborted && within(log.summary.dv, 144.2285, 0.10) && std::abs(log.summary.da) < 0.5;
    text = fmt("full: dv %.3f m/s (144.229 +-10%%), da %.4f km; ", log.summary.dv, log.summary.da);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const GuidanceLog log = fly(ctx.scenario("downleg_short_noerr"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // The table value belongs to the full leg; the short one is held to its own reference.
  const bool short_ok = !log.aborted && within(log.summary.dv, log.reference_dv, 0.10) &&
                        std::abs(log.summary.da) < 0.5 && secs < 300.0;
  text += fmt("short: dv %.3f m/s (reference %.3f +-10%%), da %.4f km, %.0f s", log.summary.dv, log.reference_dv,
              log.summary.da, secs);
  return {ok && short_ok, text};
}

Outcome c9_socp(const Context& ctx) {
  const Json data = Json::parse(read_text(ctx.data / "socp_instances.json"));
  double worst_obj = 0.0, worst_feas = 0.0;
  std::size_t count = 0, largest = 0;
  bool status_ok = true;
  for (const Json& inst : data["instances"]) {
    TrackingSocp p;
    p.cost = inst["cost"].get<std::vector<double>>();
    p.bound = inst["bound"].get<std::vector<double>>();
    for (const Json& g : inst["gain"]) {
      const auto v = g.get<std::vector<double>>();
      p.gain.push_back(Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data()));
    }
    const auto d = inst["offset"].get<std::vector<double>>();
    p.offset = Vector3(d[0], d[1], d[2]);
    p.terminal_weight = inst["weight"].get<double>();
    const SocpResult r = solve_tracking_socp(p);
    status_ok = status_ok && (r.status == SolverStatus::optimal || r.status == SolverStatus::inaccurate);
    const double ref = inst["objective"].get<double>();
    worst_obj = std::max(worst_obj, std::abs(r.objective - ref) / std::max(std::abs(ref), 1e-300));
    Vector3 term = p.offset;
    for (std::size_t k = 0; k < p.size(); ++k) {
      worst_feas = std::max({worst_feas, r.u[k].norm() - r.t[k], r.t[k] - p.bound[k]});
      term += p.gain[k] * r.u[k];
    }
    worst_feas = std::max(worst_feas, term.norm() - r.tau);
    largest = std::max(largest, p.size());
    ++count;
  }

  // Full segment problems (condensation included) against the uncondensed oracle.
  const Json segs = Json::parse(read_text(ctx.data / "segment_instances.json"));
  double worst_seg = 0.0, worst_res = 0.0;
  for (const Json& inst : segs["instances"]) {
    const SegmentProblem p = problem_from_json(inst["problem"]);
    const SegmentSolution s = solve_segment(p);
    const double ref = inst["objective"].get<double>();
    worst_seg = std::max(worst_seg, std::abs(s.objective - ref) / std::max(std::abs(ref), 1e-300));
    worst_res = std::max(worst_res, dynamics_residual(p, linear_states(p, s.accels), s.accels));
    for (std::size_t k = 0; k < p.arcs(); ++k)
      worst_feas = std::max(worst_feas, s.accels[k].norm() - p.bounds[k] * (1 + 1e-12));
  }

  const bool ok = status_ok && count >= 20 && largest <= 12 && worst_obj <= 1e-6 && worst_feas <= 1e-8 &&
                  worst_seg <= 1e-6 && worst_res <= 1e-8;
  return {ok, fmt("%zu cone programs (<= %zu arcs): objective %.1e, feasibility %.1e; %zu segments: objective "
                  "%.1e, dynamics residual %.1e",
                  count, largest, worst_obj, worst_feas, segs["instances"].size(), worst_seg, worst_res)};
}

Outcome c10_stm(const Context&) {
  const double ve = 1300.0 * kStandardGravity;
  const ForceModel model = ForceModel::for_spacecraft(SpacecraftConfig{});
  const CounterRng rng(1010);
  double worst_a = 0.0, worst_b = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    KeplerianElements el = sample_leo(rng, k);
    el.e *= 0.2;
    const CartesianState x = kep_to_cart(el, kEarth.mu);
    const double period = kTwoPi * std::sqrt(std::pow(el.a, 3) / kEarth.mu);
    const double ang = kTwoPi * rng.uniform(k, 7, 0);
    const ThrustArc arc{period / 36.0, 7.5e-8 * rng.uniform(k, 6, 0) * Vector3(0.1, std::cos(ang), std::sin(ang)),
                        1.0};
    const Vector6 xs = geqoe_scaled(cart_to_geqoe(x, kEarth), kEarth);
    const std::vector<double> steps = propagate_arc(x, 800.0, arc, model, ve).steps;
    const StmPair s = compute_stm_on_steps(xs, 800.0, arc, model, ve, steps);
    Matrix6 a_fd;
    Matrix63 b_fd;
    for (int j = 0; j < 6; ++j) {
      double best_err = INFINITY;
      for (double h : {1e-6, 1e-7}) {
        Vector6 xp = xs, xm = xs;
        xp[j] += h;
        xm[j] -= h;
        const Vector6 col = geqoe_scaled_difference(geqoe_step(xp, 800.0, arc, model, ve, steps),
                                                    geqoe_step(xm, 800.0, arc, model, ve, steps)) /
                            (2 * h);
        const double err = max_abs(col - s.a_mat.col(j));
        if (err < best_err) best_err = err, a_fd.col(j) = col;
      }
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
  }

  // dt -> 0: the departure from (I, 0) is the physical dL/dnu = dt in canonical time.
  const CartesianState x = kep_to_cart({6800.0, 0.002, 1.7, 0.3, 0.2, 0.4}, kEarth.mu);
  const Vector6 xs = geqoe_scaled(cart_to_geqoe(x, kEarth), kEarth);
  bool identity = true;
  for (double dt : {1e-6, 1e-8}) {
    const double tau = dt / kEarth.time_unit();
    const StmPair s = compute_stm_on_steps(xs, 800.0, {dt, Vector3(0, 5e-8, 0), 1.0}, model, ve, {dt});
    const double da = max_abs(s.a_mat - Matrix6::Identity()), db = max_abs(s.b_mat);
    identity = identity && da < std::max(1.1 * tau, 1e-10) && db < std::max(4.0 * tau, 1e-10);
  }
  return {worst_a <= 1e-4 && worst_b <= 1e-4 && identity,
          fmt("100 nodes: A %.2e, B %.2e (<= 1e-4); identity at dt = 1e-6, 1e-8 s %s", worst_a, worst_b,
              identity ? "holds" : "fails")};
}

Outcome c11_eclipse(const Context&) {
  double worst = 0.0;
  for (double dc : {0.3, 0.4, 0.5, 1.0}) {
    for (double l_c : {0.0, 1.3, 5.9}) {
      const int n = 2000000;
      long on = 0;
      for (int k = 0; k < n; ++k) on += eclipse_indicator((k + 0.5) * kTwoPi / n, l_c, dc);
      worst = std::max(worst, std::abs(static_cast<double>(on) / n - dc));
    }
  }
  return {worst <= 1e-6, fmt("DC' in {0.3, 0.4, 0.5, 1.0}: worst |measure - DC'| = %.1e (<= 1e-6)", worst)};
}

Outcome c12_determinism(const Context& ctx) {
  Scenario sc = ctx.scenario("upleg_fuel_higherr");
  if (ctx.ci) {
    // High-error model on the short descent keeps the CI run brief.
    const ThrustErrorModel errors = sc.guidance.errors;
    sc = ctx.scenario("downleg_short_noerr");
    sc.guidance.errors = errors;
  }
  const std::string a = log_to_json(fly(sc)).dump();
  const std::string b = log_to_json(fly(sc)).dump();
  return {a == b, fmt("%s seed %llu: %zu-byte logs %s", sc.name.c_str(),
                      static_cast<unsigned long long>(sc.guidance.errors.seed), a.size(),
                      a == b ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Context ctx;
  std::string scenarios = LTMPC_SCENARIOS, data = LTMPC_TEST_DATA;
  std::vector<int> only;
  app.add_flag("--ci", ctx.ci, "Reduced-grid variants of the long scenarios");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 12));
  app.add_option("--scenarios", scenarios, "Scenario directory");
  app.add_option("--data", data, "Oracle data directory");
  CLI11_PARSE(app, argc, argv);
  ctx.scenarios = scenarios;
  ctx.data = data;

  const std::vector<std::pair<const char*, std::function<Outcome(const Context&)>>> criteria = {
      {"coordinate round trips", c1_round_trips},
      {"GEqOE nu conservation", c2_nu_conservation},
      {"nonlinearity ordering", c3_nonlinearity},
      {"Edelbaum analytic dv", c4_edelbaum},
      {"up leg end to end", c5_upleg},
      {"error-cost monotonicity", c6_error_cost},
      {"misthrust recovery", c7_misthrust},
      {"down leg", c8_downleg},
      {"cone solver vs reference", c9_socp},
      {"STM fidelity", c10_stm},
      {"eclipse gate measure", c11_eclipse},
      {"determinism", c12_determinism},
  };
  const std::set<int> pick(only.begin(), only.end());
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-26s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
