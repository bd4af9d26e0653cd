#include "ltmpc/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltmpc/mean_elements.hpp"

namespace ltmpc {

void ThrustErrorModel::validate() const {
  if (!(p_misthrust >= 0.0 && p_misthrust <= 1.0))
    throw std::invalid_argument("errors: p_misthrust must be in [0, 1]");
  if (!(sigma_t >= 0.0)) throw std::invalid_argument("errors: sigma_t must be >= 0");
  if (!(sigma_beta >= 0.0)) throw std::invalid_argument("errors: sigma_beta must be >= 0");
}

void GuidanceConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("guidance: epsilon must be > 0");
  if (!(dc_ref > 0.0 && dc_ref <= 1.0)) throw std::invalid_argument("guidance: dc_ref must be in (0, 1]");
  if (!(dv_prime_weight > 0.0)) throw std::invalid_argument("guidance: dv_prime_weight must be > 0");
  if (forced_misthrust_segments < 0) throw std::invalid_argument("guidance: forced_misthrust_segments must be >= 0");
  segment.validate();
  errors.validate();
}

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double CounterRng::uniform(std::uint64_t segment, std::uint64_t node, std::uint64_t stream) const {
  std::uint64_t h = splitmix(seed_);
  h = splitmix(h ^ segment);
  h = splitmix(h ^ node);
  h = splitmix(h ^ stream);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t segment, std::uint64_t node, std::uint64_t stream) const {
  const double u1 = uniform(segment, node, 2 * stream);
  const double u2 = uniform(segment, node, 2 * stream + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

ErroredControls apply_thrust_errors(const std::vector<Vector3>& accels, const ThrustErrorModel& model,
                                    std::uint64_t segment_index, bool force_misthrust) {
  ErroredControls out;
  out.accels = accels;
  const CounterRng rng(model.seed);
  if (force_misthrust || (model.p_misthrust > 0.0 && rng.uniform(segment_index, 0, 0) < model.p_misthrust)) {
    for (auto& a : out.accels) a.setZero();
    out.misthrust = true;
    return out;
  }
  if (model.sigma_t == 0.0 && model.sigma_beta == 0.0) return out;

  for (std::size_t i = 0; i < accels.size(); ++i) {
    const Vector3& a = accels[i];
    const double mag = a.norm();
    if (mag == 0.0) continue;
    const double d_t = model.sigma_t * rng.normal(segment_index, i, 1);
    const double d_beta = model.sigma_beta * rng.normal(segment_index, i, 2);
    const double beta = std::asin(std::clamp(a.z() / mag, -1.0, 1.0)) + d_beta;
    const Eigen::Vector2d in_plane = a.head<2>();
    const Eigen::Vector2d dir =
        in_plane.norm() > 0.0 ? Eigen::Vector2d(in_plane.normalized()) : Eigen::Vector2d(0.0, 1.0);
    const double m = std::max(0.0, mag * (1.0 + d_t));
    out.accels[i] << m * std::cos(beta) * dir.x(), m * std::cos(beta) * dir.y(), m * std::sin(beta);
  }
  return out;
}

SegmentOutcome forward_propagate_segment(const CartesianState& x0, double m0,
                                         const SegmentProblem& problem,
                                         const std::vector<Vector3>& accels, const Environment& env,
                                         double dc, double dv_cum0) {
  const Gravity& grav = env.force.grav;
  const double ve = env.sc.exhaust_velocity();
  SegmentOutcome out;
  CartesianState x = x0;
  double m = m0;
  double t = problem.t0;
  double dv = dv_cum0;
  for (std::size_t i = 0; i < problem.arcs(); ++i) {
    const double dt = problem.dt[i];
    const MeanState ms = mean_state(x, grav);
    const double l_c = env.eclipse.l_c(t, ms.kep.raan, ms.kep.i);
    const int eta = eclipse_indicator(ms.u + 0.5 * ms.u_rate * dt, l_c, dc);
    const bool planned = accels[i].norm() > 0.0;
    if (planned) {
      out.planned_time += dt;
      if (eta == 0) ++out.gate_drops;
    }
    const Vector3 applied = eta ? accels[i] : Vector3::Zero();
    // Bounds come from guess masses; ignore the mass-model mismatch below 1e-4.
    if (applied.norm() > env.sc.max_accel(m) * (1.0 + 1e-4)) ++out.bound_violations;
    out.nodes.push_back({t, x, m, applied, eta, dv});

    ThrustArc arc;
    arc.dt = dt;
    arc.a_rtn = applied;
    arc.frame = ThrustFrame::held;
    PropagationResult r;
    try {
      r = propagate_arc(x, m, arc, env.force, ve, env.prop);
    } catch (const PropagationError& e) {
      throw PropagationError("segment node " + std::to_string(i) + ": " + e.what(), e.last_state,
                             e.mass);
    }
    x = r.x;
    m = r.m;
    t += dt;
    const double step = applied.norm() * dt * 1e3;
    if (step > 0.0) out.thrust_time += dt;
    out.dv += step;
    dv += step;
  }
  out.x = x;
  out.m = m;
  out.span = t - problem.t0;
  const ClassicalEquinoctial reached = cart_to_mean_equinoctial(x, grav);
  out.dv_prime = delta_v_prime(reached, resolve_target(problem.target, reached), grav.mu);
  return out;
}

Environment Scenario::environment() const {
  Environment env;
  env.sc = sc;
  env.force = ForceModel::for_spacecraft(sc);
  env.eclipse.jd0 = julian_date_from_iso(epoch);
  env.eclipse.dc_ref = guidance.dc_ref;
  env.nodes_per_orbit = guidance.segment.nodes_per_orbit;
  return env;
}

namespace {

TerminalSummary summarize(const CartesianState& x, double m, double dv, const TransferTarget& target,
                          const Gravity& grav) {
  TerminalSummary s;
  const KeplerianElements mk = cart_to_mean_kep(x, grav);
  const TargetElements goal = target.at(x.epoch);
  s.da = mk.a - goal.a;
  if (goal.i) s.di = (mk.i - *goal.i) / kDeg;
  if (goal.raan) s.draan = wrap_pi(mk.raan - *goal.raan) / kDeg;
  s.tof = x.epoch / kSecondsPerDay;
  s.dv = dv;
  const ClassicalEquinoctial reached = cart_to_mean_equinoctial(x, grav);
  s.dv_prime = delta_v_prime(reached, resolve_target(goal, reached), grav.mu).magnitude;
  s.m_final = m;
  return s;
}

}  // namespace

GuidanceLog run_guidance(const Scenario& scenario, const SegmentObserver& observer) {
  return run_guidance(scenario, nullptr, observer);
}

GuidanceLog run_guidance(const Scenario& scenario, ReferenceTrajectory* first_reference,
                         const SegmentObserver& observer) {
  const GuidanceConfig& cfg = scenario.guidance;
  cfg.validate();
  scenario.sc.validate();
  const Environment env = scenario.environment();
  const Gravity& grav = env.force.grav;
  TransferTarget target = scenario.target;
  if (target.raan_f) calibrate_target(target, grav);

  GuidanceLog log;
  log.scenario = scenario.name;
  log.seed = cfg.errors.seed;

  CartesianState x = kep_to_cart(scenario.initial, grav.mu, 0.0);
  double m = scenario.sc.m0;
  double dv = 0.0;

  auto regenerate = [&]() {
    try {
      return generate_reference(x, m, target, env, cfg.reference);
    } catch (const std::exception& e) {
      log.aborted = true;
      log.message = std::string("reference generation failed: ") + e.what();
      log.summary = summarize(x, m, dv, target, grav);
      throw GuidanceFailure(log.message, log);
    }
  };

  ReferenceTrajectory ref = regenerate();
  log.reference_dv = ref.dv_total;
  log.reference_tof = ref.tof / kSecondsPerDay;
  if (first_reference) *first_reference = ref;

  std::size_t first = 0;
  int index = 0;
  while (first + 1 < ref.size()) {
    const std::size_t last = segment_end(ref, first, cfg.segment);
    const SegmentGuess guess = initial_guess_segment(x, m, ref, first, last, env, scenario.sc.duty_cycle);
    const SegmentProblem problem = build_segment_problem(guess, ref, target, env, cfg.dv_prime_weight);
    const SegmentSolution sol = solve_segment(problem, cfg.socp);

    SegmentRecord rec;
    rec.index = index;
    rec.t0 = problem.t0;
    rec.tf = problem.tf;
    rec.arcs = static_cast<int>(problem.arcs());
    rec.status = to_string(sol.status);
    rec.iterations = sol.iterations;
    rec.guess_objective = guess_objective(problem);
    rec.guess_dv_prime = problem.dv_guess.norm();

    bool recompute = false;
    if (sol.status == SolverStatus::infeasible) {
      recompute = true;
    } else {
      // An unconverged solve falls back to the guess, which is feasible.
      const std::vector<Vector3>& plan =
          sol.status == SolverStatus::max_iter ? problem.a_guess : sol.accels;
      rec.dv_prime_planned = sol.dv_prime;
      rec.objective = sol.objective;
      const ErroredControls applied = apply_thrust_errors(
          plan, cfg.errors, static_cast<std::uint64_t>(index), index < cfg.forced_misthrust_segments);
      const SegmentOutcome out =
          forward_propagate_segment(x, m, problem, applied.accels, env, scenario.sc.duty_cycle, dv);
      log.nodes.insert(log.nodes.end(), out.nodes.begin(), out.nodes.end());
      x = out.x;
      m = out.m;
      dv += out.dv;
      rec.dv = out.dv;
      rec.dv_prime = out.dv_prime.magnitude;
      rec.misthrust = applied.misthrust;
      rec.gate_drops = out.gate_drops;
      rec.bound_violations = out.bound_violations;
      recompute = out.dv_prime.magnitude > cfg.epsilon;
      first = last;
    }
    rec.recompute = recompute;
    log.segments.push_back(rec);
    if (observer) observer(rec);
    ++index;

    if (recompute) {
      if (++log.recomputations > cfg.max_recomputations) {
        log.aborted = true;
        log.message = "recomputation limit reached";
        log.summary = summarize(x, m, dv, target, grav);
        throw GuidanceFailure(log.message, log);
      }
      log.recompute_times.push_back(x.epoch);
      ref = regenerate();
      first = 0;
    }
  }

  log.nodes.push_back({x.epoch, x, m, Vector3::Zero(), 1, dv});
  log.summary = summarize(x, m, dv, target, grav);
  return log;
}

}  // namespace ltmpc
