#include "ltmpc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltmpc/atmosphere.hpp"
#include "ltmpc/gravity.hpp"
#include "ltmpc/mean_elements.hpp"

namespace ltmpc {

TargetElements TransferTarget::at(double t) const {
  TargetElements e;
  e.a = a_f;
  e.i = i_f;
  if (raan_f) e.raan = *raan_f + raan_rate * t;
  return e;
}

double NodalRateModel::rate(double a, double i, const Gravity& grav) const {
  double w = (a_hi > a_lo) ? (a - a_lo) / (a_hi - a_lo) : 0.0;
  w = std::clamp(w, 0.0, 1.0);
  return j2_nodal_rate(a, i, grav) * ((1.0 - w) * k_lo + w * k_hi);
}

double measured_nodal_rate(double a, double i, const Gravity& grav, double days) {
  KeplerianElements mean{a, 0.0, i, 0.0, 0.0, 0.0, ElementKind::mean};
  const CartesianState x0 = kep_to_cart(mean_to_osc(mean, grav), grav.mu);
  ForceModel model;
  model.grav = grav;
  model.drag = false;
  ThrustArc coast;
  coast.dt = days * kSecondsPerDay;
  coast.eta = 0.0;
  const PropagationResult r = propagate_arc(x0, 1.0, coast, model, 1.0);
  const double raan1 = cart_to_mean_kep(r.x, grav).raan;
  const double raan0 = cart_to_mean_kep(x0, grav).raan;
  return wrap_pi(raan1 - raan0) / coast.dt;
}

NodalRateModel calibrate_nodal_rate(double a0, double i0, double a1, double i1, const Gravity& grav) {
  NodalRateModel m;
  if (grav.j2 == 0.0) return m;
  m.a_lo = std::min(a0, a1);
  m.a_hi = std::max(a0, a1);
  const double i_lo = (a0 <= a1) ? i0 : i1;
  const double i_hi = (a0 <= a1) ? i1 : i0;
  m.k_lo = measured_nodal_rate(m.a_lo, i_lo, grav) / j2_nodal_rate(m.a_lo, i_lo, grav);
  m.k_hi = (m.a_hi > m.a_lo + 1e-6)
               ? measured_nodal_rate(m.a_hi, i_hi, grav) / j2_nodal_rate(m.a_hi, i_hi, grav)
               : m.k_lo;
  return m;
}

void calibrate_target(TransferTarget& target, const Gravity& grav) {
  if (target.raan_f && target.i_f && grav.j2 != 0.0) {
    target.raan_rate = measured_nodal_rate(target.a_f, *target.i_f, grav);
  } else {
    target.raan_rate = target.i_f ? j2_nodal_rate(target.a_f, *target.i_f, grav) : 0.0;
  }
}

// ---------------------------------------------------------------------------
// Edelbaum

double EdelbaumTransfer::mass_at(double t) const {
  return m_start - mdot * std::clamp(t, 0.0, tof);
}

double EdelbaumTransfer::dv_at(double t) const {
  if (dv == 0.0) return 0.0;
  if (t >= tof) return dv;
  return ve * std::log(m_start / mass_at(t));
}

double EdelbaumTransfer::beta_at_dv(double dv_c) const {
  const double d = dv_c * 1e-3;
  return std::atan2(v0 * std::sin(beta0), v0 * std::cos(beta0) - d);
}

double EdelbaumTransfer::a_at_dv(double dv_c) const {
  if (dv == 0.0) return a0;
  if (dv_c >= dv) return a_f;
  const double d = dv_c * 1e-3;
  const double v2 = v0 * v0 - 2.0 * v0 * d * std::cos(beta0) + d * d;
  return a0 * v0 * v0 / v2;
}

double EdelbaumTransfer::i_at_dv(double dv_c) const {
  if (dv == 0.0) return i0;
  if (dv_c >= dv) return i_f;
  const double sign = (i_f >= i0) ? 1.0 : -1.0;
  return i0 + sign * (2.0 / kPi) * (beta_at_dv(dv_c) - beta0);
}

EdelbaumTransfer edelbaum_transfer(double a0, double i0, double a_f, double i_f,
                                   const SpacecraftConfig& sc, double dc_ref, double m_start,
                                   double mu) {
  const double di = i_f - i0;
  if (std::abs(di) > 0.5 * kPi) throw std::invalid_argument("inclination change above 90 deg");
  if (!(dc_ref > 0.0 && dc_ref <= 1.0)) throw std::invalid_argument("DC' must lie in (0, 1]");
  EdelbaumTransfer e;
  e.a0 = a0;
  e.i0 = i0;
  e.a_f = a_f;
  e.i_f = i_f;
  e.v0 = std::sqrt(mu / a0);
  e.vf = std::sqrt(mu / a_f);
  e.m_start = m_start;
  e.ve = sc.exhaust_velocity();
  e.mdot = dc_ref * sc.t_max / e.ve;
  const double c = std::cos(0.5 * kPi * std::abs(di));
  const double s = std::sin(0.5 * kPi * std::abs(di));
  const double dv2 = e.v0 * e.v0 - 2.0 * e.v0 * e.vf * c + e.vf * e.vf;
  e.dv = std::sqrt(std::max(dv2, 0.0)) * 1e3;
  if (e.dv == 0.0) return e;
  e.beta0 = std::atan2(s, e.v0 / e.vf - c);
  const double m_end = m_start * std::exp(-e.dv / e.ve);
  e.tof = (m_start - m_end) / e.mdot;
  return e;
}

double transfer_node_drift(const EdelbaumTransfer& leg, const NodalRateModel& rates,
                           const Gravity& grav) {
  if (leg.tof == 0.0) return 0.0;
  constexpr int n = 200;
  const double h = leg.tof / n;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double dvc = leg.dv_at(j * h);
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    sum += w * rates.rate(leg.a_at_dv(dvc), leg.i_at_dv(dvc), grav);
  }
  return sum * h / 3.0;
}

// ---------------------------------------------------------------------------
// Drift-orbit RAAN matching

namespace {

struct Candidate {
  DriftPlan plan;
  double score_dv = 0.0;
};

bool better(const DriftPlan& x, const DriftPlan& y) {
  if (std::abs(x.dv - y.dv) > 1e-9) return x.dv < y.dv;
  if (std::abs(x.tof - y.tof) > 1e-6) return x.tof < y.tof;
  return x.a_d < y.a_d;
}

struct DriftProblem {
  const MeanOrbit& start;
  double m_start;
  double raan_target;  // at t_start
  double target_rate;
  double a_f, i_f;
  const Environment& env;
  const NodalRateModel& rates;
  const DriftSearchOptions& opt;

  // revolutions < 0: pick the first admissible wait.
  std::optional<DriftPlan> evaluate(double a_d, double i_d, int revolutions = -1) const {
    const Gravity& grav = env.force.grav;
    const double dc = env.eclipse.dc_ref;
    DriftPlan p;
    p.a_d = a_d;
    p.i_d = i_d;
    p.leg1 = edelbaum_transfer(start.a, start.i, a_d, i_d, env.sc, dc, m_start, grav.mu);
    const double m_mid = p.leg1.mass_at(p.leg1.tof);
    p.leg2 = edelbaum_transfer(a_d, i_d, a_f, i_f, env.sc, dc, m_mid, grav.mu);
    const double t_moving = p.leg1.tof + p.leg2.tof;
    const double gap = start.raan + transfer_node_drift(p.leg1, rates, grav) +
                       transfer_node_drift(p.leg2, rates, grav) -
                       (raan_target + target_rate * t_moving);
    const double rel = rates.rate(a_d, i_d, grav) - target_rate;
    const double residual = wrap_pi(gap);

    if (std::abs(residual) < 1e-9) {
      p.t_wait = 0.0;
    } else {
      if (std::abs(rel) < 1e-15) return std::nullopt;
      const double base = (rel > 0.0 ? wrap_two_pi(-gap) : wrap_two_pi(gap)) / std::abs(rel);
      const double cycle = kTwoPi / std::abs(rel);
      int k = revolutions;
      if (k < 0) k = (base < opt.wait_guard) ? 1 : 0;
      p.t_wait = base + k * cycle;
      p.revolutions = k;
      if (p.t_wait < opt.wait_guard) return std::nullopt;
    }
    if (p.t_wait > opt.max_wait) return std::nullopt;

    double drag_dv = 0.0;
    if (env.force.drag && p.t_wait > 0.0) {
      const double v = std::sqrt(grav.mu / a_d) * 1e3;
      const double rho = harris_priester_density(a_d - grav.radius).rho;
      drag_dv = p.t_wait * 0.5 * rho * env.sc.cd * env.sc.area / m_mid * v * v;
    }
    p.dv = p.leg1.dv + p.leg2.dv + drag_dv;
    p.tof = t_moving + p.t_wait;
    return p;
  }
};

}  // namespace

DriftPlan raan_drift_match(const MeanOrbit& start, double m_start, double t_start,
                           const TransferTarget& target, const Environment& env,
                           const NodalRateModel& rates, const DriftSearchOptions& opt) {
  if (!target.raan_f) throw std::invalid_argument("raan_drift_match needs a target node");
  const Gravity& grav = env.force.grav;
  const double i_f = target.i_f.value_or(start.i);
  const TargetElements tgt = target.at(t_start);
  const DriftProblem prob{start, m_start, *tgt.raan, target.raan_rate, target.a_f, i_f, env, rates, opt};

  std::optional<DriftPlan> best;
  auto consider = [&](double a_d, double i_d) {
    if (i_d <= 0.0 || i_d >= kPi) return;
    std::optional<DriftPlan> c = prob.evaluate(a_d, i_d);
    if (c && (!best || better(*c, *best))) best = c;
  };

  const double i_lo = std::min(start.i, i_f) - opt.inc_margin;
  const double i_hi = std::max(start.i, i_f) + opt.inc_margin;
  const int n_alt = static_cast<int>(std::floor((opt.alt_max - opt.alt_min) / opt.alt_step + 1e-9));
  const int n_inc = static_cast<int>(std::floor((i_hi - i_lo) / opt.inc_step + 1e-9));
  for (int ja = 0; ja <= n_alt; ++ja) {
    const double a_d = grav.radius + opt.alt_min + ja * opt.alt_step;
    for (int ji = 0; ji <= n_inc; ++ji) consider(a_d, i_lo + ji * opt.inc_step);
  }
  // The end points themselves are always candidates.
  consider(start.a, start.i);
  consider(target.a_f, i_f);
  if (!best) throw InfeasibleTransfer("no drift orbit closes the node gap within the search bounds");

  if (opt.refine) {
    double da = opt.alt_step;
    double di = opt.inc_step;
    const double a_min = grav.radius + opt.alt_min;
    const double a_max = grav.radius + opt.alt_max;
    while (da > 1e-4 || di > 1e-7 * kDeg) {
      bool moved = false;
      const double ca = best->a_d;
      const double ci = best->i_d;
      const double trial[4][2] = {{ca + da, ci}, {ca - da, ci}, {ca, ci + di}, {ca, ci - di}};
      for (const auto& tr : trial) {
        if (tr[0] < a_min || tr[0] > a_max) continue;
        std::optional<DriftPlan> c = prob.evaluate(tr[0], tr[1], best->revolutions);
        if (c && better(*c, *best)) {
          best = c;
          moved = true;
          break;
        }
      }
      if (!moved) {
        da *= 0.5;
        di *= 0.5;
      }
    }
  }
  return *best;
}

DriftPlan direct_plan(const MeanOrbit& start, double m_start, const TransferTarget& target,
                      const Environment& env) {
  const double i_f = target.i_f.value_or(start.i);
  const double mu = env.force.grav.mu;
  DriftPlan p;
  p.a_d = target.a_f;
  p.i_d = i_f;
  p.leg1 = edelbaum_transfer(start.a, start.i, target.a_f, i_f, env.sc, env.eclipse.dc_ref, m_start, mu);
  p.leg2 = edelbaum_transfer(target.a_f, i_f, target.a_f, i_f, env.sc, env.eclipse.dc_ref,
                             p.leg1.mass_at(p.leg1.tof), mu);
  p.dv = p.leg1.dv;
  p.tof = p.leg1.tof;
  return p;
}

// ---------------------------------------------------------------------------
// Reference trajectory

double ReferenceTrajectory::interp(const std::vector<double>& y, double time) const {
  if (t.size() == 1 || time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const double w = (time - t[j - 1]) / (t[j] - t[j - 1]);
  return y[j - 1] + w * (y[j] - y[j - 1]);
}

TargetElements ReferenceTrajectory::elements_at(double time, const TransferTarget& target) const {
  TargetElements e;
  e.a = interp(a, time);
  if (target.i_f) e.i = interp(inc, time);
  if (target.raan_f) e.raan = interp(raan, time);
  return e;
}

namespace {

struct ProfilePoint {
  double f = 0.0, beta = 0.0, a = 0.0, inc = 0.0, dv = 0.0;
};

double signed_beta(const EdelbaumTransfer& leg, double dv_c) {
  const double b = leg.beta_at_dv(dv_c);
  return (leg.i_f >= leg.i0) ? b : -b;
}

ProfilePoint profile_at(const DriftPlan& plan, double tau) {
  ProfilePoint p;
  const EdelbaumTransfer& l1 = plan.leg1;
  const EdelbaumTransfer& l2 = plan.leg2;
  if (l1.tof > 0.0 && tau < l1.tof) {
    p.dv = l1.dv_at(tau);
    p.f = l1.accel_at(tau);
    p.beta = signed_beta(l1, p.dv);
    p.a = l1.a_at_dv(p.dv);
    p.inc = l1.i_at_dv(p.dv);
    return p;
  }
  const double t2 = tau - l1.tof - plan.t_wait;
  if (t2 < 0.0 || l2.tof == 0.0) {
    p.dv = l1.dv;
    p.a = (l2.tof == 0.0 && t2 >= 0.0) ? l2.a_f : plan.a_d;
    p.inc = (l2.tof == 0.0 && t2 >= 0.0) ? l2.i_f : plan.i_d;
    if (l1.tof == 0.0 && l2.tof == 0.0) {
      p.a = l1.a_f;
      p.inc = l1.i_f;
    }
    return p;
  }
  const double dv2 = l2.dv_at(t2);
  p.dv = l1.dv + dv2;
  p.f = (t2 < l2.tof) ? l2.accel_at(t2) : 0.0;
  p.beta = signed_beta(l2, dv2);
  p.a = l2.a_at_dv(dv2);
  p.inc = l2.i_at_dv(dv2);
  return p;
}

}  // namespace

ReferenceTrajectory sample_reference(const DriftPlan& plan, const MeanOrbit& start, double t_start,
                                     const Environment& env, const NodalRateModel& rates) {
  const Gravity& grav = env.force.grav;
  ReferenceTrajectory ref;
  ref.plan = plan;
  ref.dc_ref = env.eclipse.dc_ref;
  ref.nodes_per_orbit = env.nodes_per_orbit;
  ref.period = kTwoPi * std::sqrt(start.a * start.a * start.a / grav.mu);
  ref.m0 = plan.leg1.m_start;
  ref.dv_total = plan.leg1.dv + plan.leg2.dv;
  ref.tof = plan.tof;

  const double step = ref.period / env.nodes_per_orbit;
  ref.t.push_back(t_start);
  if (plan.tof >= 1.0) {
    for (long k = 1;; ++k) {
      const double tk = t_start + k * step;
      if (tk >= t_start + plan.tof - 1e-6 * step) break;
      ref.t.push_back(tk);
    }
    ref.t.push_back(t_start + plan.tof);
  }

  const std::size_t n = ref.t.size();
  ref.f_t.resize(n);
  ref.beta.resize(n);
  ref.a.resize(n);
  ref.inc.resize(n);
  ref.raan.resize(n);
  ref.dv_cum.resize(n);
  double rate_prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const ProfilePoint p = profile_at(plan, ref.t[k] - t_start);
    ref.f_t[k] = p.f;
    ref.beta[k] = p.beta;
    ref.a[k] = p.a;
    ref.inc[k] = p.inc;
    ref.dv_cum[k] = p.dv;
    const double rate = rates.rate(p.a, p.inc, grav);
    ref.raan[k] = (k == 0) ? start.raan : ref.raan[k - 1] + 0.5 * (rate + rate_prev) * (ref.t[k] - ref.t[k - 1]);
    rate_prev = rate;
  }
  return ref;
}

namespace {

bool back_half(double u) {
  const double w = wrap_two_pi(u);
  return w >= 0.5 * kPi && w < 1.5 * kPi;
}

}  // namespace

ReferencePropagation propagate_reference(const ReferenceTrajectory& ref, const CartesianState& x0,
                                         double m0, const TransferTarget& target,
                                         const Environment& env) {
  const Gravity& grav = env.force.grav;
  const double dc = ref.dc_ref;
  const double ve = env.sc.exhaust_velocity();
  ReferencePropagation out;
  CartesianState x = x0;
  double m = m0;
  int eta_prev = -1;
  for (std::size_t k = 0; k + 1 < ref.size(); ++k) {
    const double tk = ref.t[k];
    const double dt = ref.t[k + 1] - tk;
    const MeanState ms = mean_state(x, grav);
    const double l_c = env.eclipse.l_c(tk, ms.kep.raan, ms.kep.i);
    std::vector<double> points;
    for (double p : eclipse_switch_points(l_c, dc)) points.push_back(p);
    points.push_back(0.5 * kPi);
    points.push_back(1.5 * kPi);
    std::vector<double> cuts = latitude_crossings(ms.u, ms.u_rate, dt, points);
    cuts.push_back(dt);
    double s0 = 0.0;
    for (double s1 : cuts) {
      if (s1 - s0 < 1e-9) continue;
      const double sm = 0.5 * (s0 + s1);
      const double u_mid = ms.u + ms.u_rate * sm;
      const double f = ref.interp(ref.f_t, tk + sm);
      const int eta = (dc >= 1.0) ? 1 : eclipse_indicator(u_mid, l_c, dc);
      if (f > 0.0) {
        if (eta_prev >= 0 && eta != eta_prev) out.switch_times.push_back(tk + s0);
        eta_prev = eta;
      } else {
        eta_prev = -1;
      }
      const double b = ref.interp(ref.beta, tk + sm);
      const double beta = back_half(u_mid) ? -b : b;
      ThrustArc arc;
      arc.dt = s1 - s0;
      arc.eta = eta;
      arc.frame = ThrustFrame::rotating;
      arc.a_rtn = (f / dc) * Vector3(0.0, std::cos(beta), std::sin(beta));
      const PropagationResult r = propagate_arc(x, m, arc, env.force, ve, env.prop);
      x = r.x;
      m = r.m;
      s0 = s1;
    }
  }
  out.x_end = x;
  out.m_end = m;
  const ClassicalEquinoctial reached = cart_to_mean_equinoctial(x, grav);
  const ClassicalEquinoctial goal = resolve_target(target.at(ref.tf()), reached);
  out.dv_prime = delta_v_prime(reached, goal, grav.mu);
  return out;
}

ReferenceTrajectory apply_thrust_adjustment(const ReferenceTrajectory& ref, double dv_r,
                                            const Environment& env) {
  if (dv_r == 0.0 || ref.size() < 2) return ref;
  ReferenceTrajectory out = ref;
  const double ve = env.sc.exhaust_velocity();
  const double span = ref.tf() - ref.t0();
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const double dv_adj = ref.dv_cum[k] + (ref.t[k] - ref.t0()) / span * dv_r;
    const double m_adj = ref.m0 / std::exp(dv_adj / ve);
    out.dv_cum[k] = dv_adj;
    if (ref.f_t[k] > 0.0) out.f_t[k] = ref.dc_ref * env.sc.t_max / m_adj * 1e-3;
  }
  out.dv_total = ref.dv_total + dv_r;
  out.dv_adjust = ref.dv_adjust + dv_r;
  return out;
}

ReferenceTrajectory adjust_thrust_profile(const ReferenceTrajectory& ref, const CartesianState& x0,
                                          double m0, const TransferTarget& target,
                                          const Environment& env) {
  if (ref.size() < 2) return ref;
  const ReferencePropagation prop = propagate_reference(ref, x0, m0, target, env);
  const ReferenceTrajectory adj = apply_thrust_adjustment(ref, prop.dv_prime.magnitude, env);

  std::vector<double> grid = adj.t;
  grid.insert(grid.end(), prop.switch_times.begin(), prop.switch_times.end());
  std::sort(grid.begin(), grid.end());
  std::vector<double> merged;
  for (double t : grid) {
    if (merged.empty() || t - merged.back() > 1e-6) merged.push_back(t);
  }
  merged.back() = adj.tf();

  ReferenceTrajectory out = adj;
  out.t = merged;
  out.switch_times = prop.switch_times;
  auto resample = [&](const std::vector<double>& y) {
    std::vector<double> r(merged.size());
    for (std::size_t k = 0; k < merged.size(); ++k) r[k] = adj.interp(y, merged[k]);
    return r;
  };
  out.f_t = resample(adj.f_t);
  out.beta = resample(adj.beta);
  out.a = resample(adj.a);
  out.inc = resample(adj.inc);
  out.raan = resample(adj.raan);
  out.dv_cum = resample(adj.dv_cum);
  return out;
}

ReferenceTrajectory generate_reference(const CartesianState& x0, double m0,
                                       const TransferTarget& target, const Environment& env,
                                       const ReferenceOptions& options) {
  const Gravity& grav = env.force.grav;
  const KeplerianElements mk = cart_to_mean_kep(x0, grav);
  MeanOrbit start{mk.a, mk.i, mk.raan};
  const double i_f = target.i_f.value_or(start.i);
  const NodalRateModel rates = calibrate_nodal_rate(start.a, start.i, target.a_f, i_f, grav);

  DriftPlan plan = target.raan_f
                       ? raan_drift_match(start, m0, x0.epoch, target, env, rates, options.drift)
                       : direct_plan(start, m0, target, env);
  if (plan.tof < 1.0) {
    plan.tof = 0.0;
    plan.leg1.tof = plan.leg2.tof = 0.0;
  }
  ReferenceTrajectory ref = sample_reference(plan, start, x0.epoch, env, rates);
  if (options.adjust) ref = adjust_thrust_profile(ref, x0, m0, target, env);
  return ref;
}

}  // namespace ltmpc
