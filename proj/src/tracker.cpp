#include "ltmpc/tracker.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ltmpc/mean_elements.hpp"

namespace ltmpc {

void SegmentConfig::validate() const {
  if (nodes_per_orbit < 8) throw std::invalid_argument("segment: nodes_per_orbit must be >= 8");
  if (n_orbits < 1) throw std::invalid_argument("segment: n_orbits must be >= 1");
}

std::size_t segment_end(const ReferenceTrajectory& ref, std::size_t first, const SegmentConfig& seg) {
  const std::size_t last = ref.size() - 1;
  if (first >= last) return last;
  const double t_end = ref.t[first] + seg.n_orbits * ref.period;
  const auto it = std::lower_bound(ref.t.begin() + first + 1, ref.t.end(), t_end - 1e-6);
  if (it == ref.t.end()) return last;
  return static_cast<std::size_t>(it - ref.t.begin());
}

namespace {

bool back_half(double u) {
  const double w = wrap_two_pi(u);
  return w >= 0.5 * kPi && w < 1.5 * kPi;
}

// Sub-arc boundaries inside (0, dt), dropping slivers shorter than a millisecond.
std::vector<double> split_interval(const MeanState& ms, double dt, double l_c, double dc_ref,
                                   double dc) {
  std::vector<double> points{0.5 * kPi, 1.5 * kPi};
  if (dc_ref < 1.0)
    for (double p : eclipse_switch_points(l_c, dc_ref)) points.push_back(p);
  if (dc < 1.0)
    for (double p : eclipse_switch_points(l_c, dc)) points.push_back(p);
  std::vector<double> out;
  double prev = 0.0;
  for (double s : latitude_crossings(ms.u, ms.u_rate, dt, points)) {
    if (s - prev < 1e-3 || dt - s < 1e-3) continue;
    out.push_back(s);
    prev = s;
  }
  out.push_back(dt);
  return out;
}

}  // namespace

SegmentGuess initial_guess_segment(const CartesianState& x0, double m0,
                                   const ReferenceTrajectory& ref, std::size_t first,
                                   std::size_t last, const Environment& env, double dc) {
  if (last >= ref.size() || first > last) throw std::out_of_range("guess: segment outside reference");
  const Gravity& grav = env.force.grav;
  const double ve = env.sc.exhaust_velocity();
  const double dc_ref = ref.dc_ref;

  SegmentGuess g;
  CartesianState x = x0;
  x.epoch = ref.t[first];
  double m = m0;
  auto push_node = [&](double t) {
    g.t.push_back(t);
    g.states.push_back(x);
    g.geqoe.push_back(geqoe_scaled(cart_to_geqoe(x, grav), grav));
    g.masses.push_back(m);
  };
  push_node(ref.t[first]);

  for (std::size_t k = first; k < last; ++k) {
    const double tk = ref.t[k];
    const double dt = ref.t[k + 1] - tk;
    const MeanState ms = mean_state(x, grav);
    const double l_c = env.eclipse.l_c(tk, ms.kep.raan, ms.kep.i);
    double s0 = 0.0;
    for (double s1 : split_interval(ms, dt, l_c, dc_ref, dc)) {
      const double u_mid = ms.u + ms.u_rate * 0.5 * (s0 + s1);
      const int eta_plan = eclipse_indicator(u_mid, l_c, dc_ref);
      const int eta = eclipse_indicator(u_mid, l_c, dc);
      const double f = 0.5 * (ref.interp(ref.f_t, tk + s0) + ref.interp(ref.f_t, tk + s1));
      double beta = 0.5 * (ref.interp(ref.beta, tk + s0) + ref.interp(ref.beta, tk + s1));
      if (back_half(u_mid)) beta = -beta;
      const double mag = std::min(eta_plan * f / dc_ref, eta * env.sc.max_accel(m));

      ThrustArc arc;
      arc.dt = s1 - s0;
      arc.eta = eta;
      arc.frame = ThrustFrame::held;
      arc.a_rtn = mag * Vector3(0.0, std::cos(beta), std::sin(beta));
      PropagationResult r;
      try {
        r = propagate_arc(x, m, arc, env.force, ve, env.prop);
      } catch (const PropagationError& e) {
        throw PropagationError("guess node " + std::to_string(g.arcs()) + ": " + e.what(),
                               e.last_state, e.mass);
      }
      g.accels.push_back(arc.a_rtn);
      g.eta_plan.push_back(eta_plan);
      g.eta.push_back(eta);
      g.steps.push_back(std::move(r.steps));
      x = r.x;
      m = r.m;
      push_node(tk + s1);
      s0 = s1;
    }
  }
  g.accels.push_back(Vector3::Zero());
  return g;
}

Vector3 dv_prime_components(const Vector6& x_scaled, const TargetElements& target,
                            const Gravity& grav) {
  const CartesianState x = geqoe_to_cart(geqoe_unscaled(x_scaled, grav), grav);
  const ClassicalEquinoctial cur = cart_to_mean_equinoctial(x, grav);
  return delta_v_prime(cur, resolve_target(target, cur), grav.mu).components;
}

SegmentProblem build_segment_problem(const SegmentGuess& guess, const ReferenceTrajectory& ref,
                                     const TransferTarget& transfer, const Environment& env,
                                     double dv_prime_weight) {
  const Gravity& grav = env.force.grav;
  const double ve = env.sc.exhaust_velocity();
  const std::size_t n = guess.arcs();

  SegmentProblem p;
  p.x_guess = guess.geqoe;
  p.masses = guess.masses;
  p.x0 = guess.geqoe.front();
  p.t0 = guess.t.front();
  p.tf = guess.t.back();
  p.dv_prime_weight = dv_prime_weight;
  p.accel_unit = grav.accel_unit();
  p.target = (p.tf >= ref.tf() - 1e-6) ? transfer.at(p.tf) : ref.elements_at(p.tf, transfer);

  p.dt.resize(n);
  p.stm_chain.resize(n);
  p.a_guess.resize(n);
  p.bounds.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ThrustArc arc;
    arc.dt = guess.t[k + 1] - guess.t[k];
    arc.eta = guess.eta[k];
    arc.frame = ThrustFrame::held;
    arc.a_rtn = guess.accels[k];
    p.dt[k] = arc.dt;
    p.a_guess[k] = arc.a_rtn;
    p.bounds[k] = guess.eta[k] * env.sc.max_accel(guess.masses[k]);
    p.stm_chain[k] = compute_stm_on_steps(guess.geqoe[k], guess.masses[k], arc, env.force, ve,
                                          guess.steps[k]);
  }

  const Vector6& xf = p.x_guess.back();
  p.dv_guess = dv_prime_components(xf, p.target, grav);
  const double h = 1e-6;
  for (int j = 0; j < 6; ++j) {
    Vector6 xp = xf, xm = xf;
    xp[j] += h;
    xm[j] -= h;
    p.dv_jacobian.col(j) =
        (dv_prime_components(xp, p.target, grav) - dv_prime_components(xm, p.target, grav)) / (2.0 * h);
  }
  return p;
}

std::vector<Vector6> linear_states(const SegmentProblem& p, const std::vector<Vector3>& accels) {
  const double au = p.accel_unit;
  std::vector<Vector6> out{p.x0};
  Vector6 dx = geqoe_scaled_difference(p.x0, p.x_guess.front());
  for (std::size_t k = 0; k < p.arcs(); ++k) {
    dx = p.stm_chain[k].a_mat * dx + p.stm_chain[k].b_mat * ((accels[k] - p.a_guess[k]) / au);
    out.push_back(p.x_guess[k + 1] + dx);
  }
  return out;
}

double dynamics_residual(const SegmentProblem& p, const std::vector<Vector6>& states,
                         const std::vector<Vector3>& accels) {
  const double au = p.accel_unit;
  double worst = 0.0;
  for (std::size_t k = 0; k < p.arcs(); ++k) {
    const Vector6 d0 = geqoe_scaled_difference(states[k], p.x_guess[k]);
    const Vector6 d1 = geqoe_scaled_difference(states[k + 1], p.x_guess[k + 1]);
    const Vector6 r = d1 - p.stm_chain[k].a_mat * d0 -
                      p.stm_chain[k].b_mat * ((accels[k] - p.a_guess[k]) / au);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double guess_objective(const SegmentProblem& p) {
  double dv = 0.0;
  for (std::size_t k = 0; k < p.arcs(); ++k) dv += p.a_guess[k].norm() * p.dt[k] * 1e3;
  return dv + p.dv_prime_weight * p.dv_guess.norm();
}

SegmentSolution solve_segment(const SegmentProblem& p, const SocpSettings& settings) {
  const std::size_t n = p.arcs();
  const double au = p.accel_unit;
  SegmentSolution sol;
  sol.accels.assign(n, Vector3::Zero());
  sol.x_terminal = p.x_guess.back();
  if (n == 0) {
    sol.dv_prime = p.dv_guess.norm();
    sol.objective = p.dv_prime_weight * sol.dv_prime;
    sol.status = SolverStatus::optimal;
    return sol;
  }

  // Terminal sensitivity of each control: Phi(K, k+1) B(k), in scaled GEqOE
  // per km/s^2.
  std::vector<Matrix63> mb(n);
  Matrix6 phi = Matrix6::Identity();
  for (std::size_t k = n; k-- > 0;) {
    mb[k] = phi * p.stm_chain[k].b_mat / au;
    phi = phi * p.stm_chain[k].a_mat;
  }
  const Vector6 dx0 = geqoe_scaled_difference(p.x0, p.x_guess.front());

  double scale = 0.0;
  for (double b : p.bounds) scale = std::max(scale, b);
  if (!(scale > 0.0)) scale = 1e-7;

  TrackingSocp socp;
  socp.terminal_weight = p.dv_prime_weight;
  Vector3 offset = p.dv_guess + p.dv_jacobian * (phi * dx0);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix3 gk = p.dv_jacobian * mb[k];
    offset -= gk * p.a_guess[k];
    socp.cost.push_back(1e3 * p.dt[k] * scale);
    socp.bound.push_back(p.bounds[k] / scale);
    socp.gain.push_back(gk * scale);
  }
  socp.offset = offset;

  const SocpResult r = solve_tracking_socp(socp, settings);
  sol.status = r.status;
  sol.iterations = r.iterations;
  if (r.status == SolverStatus::infeasible) return sol;

  Vector6 dx = phi * dx0;
  for (std::size_t k = 0; k < n; ++k) {
    Vector3 a = r.u[k] * scale;
    // Interior-point iterates sit a hair inside the cone; clip the rounding.
    const double norm = a.norm();
    if (norm > p.bounds[k]) a *= p.bounds[k] / norm;
    sol.accels[k] = a;
    sol.dv_segment += a.norm() * p.dt[k] * 1e3;
    dx += mb[k] * (a - p.a_guess[k]);
  }
  sol.x_terminal = p.x_guess.back() + dx;
  sol.dv_prime = r.tau;
  sol.objective = sol.dv_segment + p.dv_prime_weight * sol.dv_prime;
  return sol;
}

}  // namespace ltmpc
