#include "ltmpc/dynamics.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <string>

#include "ltmpc/atmosphere.hpp"
#include "ltmpc/gravity.hpp"

namespace ltmpc {

namespace odeint = boost::numeric::odeint;

void SpacecraftConfig::validate() const {
  if (!(m0 > 0.0)) throw std::invalid_argument("m0 must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(isp > 0.0)) throw std::invalid_argument("isp must be positive");
  if (!(g0 > 0.0)) throw std::invalid_argument("g0 must be positive");
  if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) throw std::invalid_argument("duty_cycle must lie in (0, 1]");
  if (!(cd > 0.0)) throw std::invalid_argument("cd must be positive");
  if (!(area > 0.0)) throw std::invalid_argument("area must be positive");
}

Vector3 natural_acceleration(const Vector3& r, const Vector3& v, double m, const ForceModel& model) {
  Vector3 acc = two_body_acceleration<double>(r, model.grav.mu);
  if (model.grav.j2 != 0.0) acc += j2_acceleration<double>(r, model.grav);
  if (model.drag) {
    const Vector3 omega(0.0, 0.0, model.grav.rotation_rate);
    const Vector3 v_rel = v - omega.cross(r);
    const double rho = atmospheric_density(r.norm() - model.grav.radius);
    acc -= 0.5 * rho * model.cd * model.area / m * v_rel.norm() * v_rel * 1e3;
  }
  return acc;
}

Vector3 total_acceleration(const CartesianState& x, double m, const Vector3& a_rtn,
                           const ForceModel& model) {
  return natural_acceleration(x.r, x.v, m, model) + rtn_basis(x.r, x.v) * a_rtn;
}

namespace {

using State = std::array<double, 7>;

struct Rhs {
  const ForceModel& model;
  Vector3 a_rtn;
  Vector3 a_held;  // inertial, for ThrustFrame::held
  bool held;
  double mdot_per_mass;  // 1/s per unit mass, already gated

  void operator()(const State& y, State& dy, double) const {
    const Vector3 r(y[0], y[1], y[2]);
    const Vector3 v(y[3], y[4], y[5]);
    Vector3 acc = natural_acceleration(r, v, y[6], model);
    acc += held ? a_held : Vector3(rtn_basis(r, v) * a_rtn);
    dy[0] = y[3];
    dy[1] = y[4];
    dy[2] = y[5];
    dy[3] = acc[0];
    dy[4] = acc[1];
    dy[5] = acc[2];
    dy[6] = -mdot_per_mass * y[6];
  }
};

Rhs make_rhs(const CartesianState& x0, const ThrustArc& arc, const ForceModel& model,
             double exhaust_velocity) {
  const Vector3 a = arc.eta > 0.0 ? Vector3(arc.a_rtn) : Vector3::Zero();
  const double mag = a.norm();
  return Rhs{model, a, rtn_basis(x0.r, x0.v) * a, arc.frame == ThrustFrame::held,
             mag > 0.0 ? mag * 1e3 / exhaust_velocity : 0.0};
}

State pack(const CartesianState& x, double m) {
  return {x.r[0], x.r[1], x.r[2], x.v[0], x.v[1], x.v[2], m};
}

void unpack(const State& y, CartesianState& x, double& m) {
  x.r = Vector3(y[0], y[1], y[2]);
  x.v = Vector3(y[3], y[4], y[5]);
  m = y[6];
}

bool finite(const State& y) {
  for (double c : y)
    if (!std::isfinite(c)) return false;
  return true;
}

}  // namespace

PropagationResult propagate_arc(const CartesianState& x0, double m0, const ThrustArc& arc,
                                const ForceModel& model, double exhaust_velocity,
                                const PropagatorSettings& settings, const StepObserver& observer) {
  if (arc.dt < 0.0) throw std::invalid_argument("propagation interval must be non-negative");
  PropagationResult out;
  out.x = x0;
  out.m = m0;
  if (arc.dt == 0.0) return out;

  const Rhs rhs = make_rhs(x0, arc, model, exhaust_velocity);
  auto stepper = odeint::make_controlled(settings.abs_tol, settings.rel_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  State y = pack(x0, m0);
  double t = 0.0;
  // Initial step: a small fraction of the local orbital period.
  const double period = kTwoPi * std::sqrt(std::pow(x0.r.norm(), 3) / model.grav.mu);
  double h = std::min(arc.dt, period / 200.0);
  long n = 0;
  while (t < arc.dt) {
    if (++n > settings.max_steps) {
      CartesianState last;
      double m;
      unpack(y, last, m);
      last.epoch = x0.epoch + t;
      throw PropagationError("step limit exceeded", last, m);
    }
    const bool last_step = t + h >= arc.dt;
    if (last_step) h = arc.dt - t;
    const State y_prev = y;
    const double t_prev = t;
    double h_try = h;
    odeint::controlled_step_result res = stepper.try_step(rhs, y, t, h_try);
    if (res == odeint::fail) {
      h = h_try;
      if (h < 1e-9) {
        CartesianState last;
        double m;
        unpack(y, last, m);
        last.epoch = x0.epoch + t;
        throw PropagationError("step size underflow", last, m);
      }
      continue;
    }
    if (!finite(y) || std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) - model.grav.radius <
                          settings.min_altitude) {
      CartesianState last;
      double m;
      unpack(y_prev, last, m);
      last.epoch = x0.epoch + t_prev;
      throw PropagationError("state left the valid domain (re-entry or non-finite)", last, m);
    }
    out.steps.push_back(t - t_prev);
    if (last_step) t = arc.dt;
    if (observer) {
      CartesianState xs;
      double m;
      unpack(y, xs, m);
      xs.epoch = x0.epoch + t;
      observer(xs.epoch, xs, m);
    }
    h = h_try;
  }
  unpack(y, out.x, out.m);
  out.x.epoch = x0.epoch + arc.dt;
  return out;
}

PropagationResult replay_arc(const CartesianState& x0, double m0, const ThrustArc& arc,
                             const ForceModel& model, double exhaust_velocity,
                             const std::vector<double>& steps) {
  const Rhs rhs = make_rhs(x0, arc, model, exhaust_velocity);
  odeint::runge_kutta_fehlberg78<State> stepper;
  State y = pack(x0, m0);
  double t = 0.0;
  for (double h : steps) {
    stepper.do_step(rhs, y, t, h);
    t += h;
  }
  PropagationResult out;
  unpack(y, out.x, out.m);
  out.x.epoch = x0.epoch + t;
  out.steps = steps;
  return out;
}

PropagationResult propagate(const CartesianState& x0, double m0, const std::vector<ThrustArc>& arcs,
                            const ForceModel& model, double exhaust_velocity,
                            const PropagatorSettings& settings) {
  PropagationResult out;
  out.x = x0;
  out.m = m0;
  for (const ThrustArc& arc : arcs) {
    PropagationResult step = propagate_arc(out.x, out.m, arc, model, exhaust_velocity, settings);
    out.x = step.x;
    out.m = step.m;
    out.steps.insert(out.steps.end(), step.steps.begin(), step.steps.end());
  }
  return out;
}

}  // namespace ltmpc
