#include "ltmpc/stm.hpp"

namespace ltmpc {

Vector6 geqoe_step(const Vector6& x_scaled, double m, const ThrustArc& arc, const ForceModel& model,
                   double exhaust_velocity, const std::vector<double>& steps) {
  const CartesianState x0 = geqoe_to_cart(geqoe_unscaled(x_scaled, model.grav), model.grav);
  const PropagationResult r = replay_arc(x0, m, arc, model, exhaust_velocity, steps);
  return geqoe_scaled(cart_to_geqoe(r.x, model.grav), model.grav);
}

StmPair compute_stm_on_steps(const Vector6& x_scaled, double m, const ThrustArc& arc,
                             const ForceModel& model, double exhaust_velocity,
                             const std::vector<double>& steps,
                    const StmOptions& options) {
  StmPair out;
  if (steps.empty()) return out;
  const double dx = options.state_step;
  for (int j = 0; j < 6; ++j) {
    Vector6 xp = x_scaled, xm = x_scaled;
    xp[j] += dx;
    xm[j] -= dx;
    const Vector6 fp = geqoe_step(xp, m, arc, model, exhaust_velocity, steps);
    const Vector6 fm = geqoe_step(xm, m, arc, model, exhaust_velocity, steps);
    out.a_mat.col(j) = geqoe_scaled_difference(fp, fm) / (2.0 * dx);
  }
  if (arc.eta > 0.0) {
    const double da = options.control_step * model.grav.accel_unit();
    for (int j = 0; j < 3; ++j) {
      ThrustArc ap = arc, am = arc;
      ap.a_rtn[j] += da;
      am.a_rtn[j] -= da;
      const Vector6 fp = geqoe_step(x_scaled, m, ap, model, exhaust_velocity, steps);
      const Vector6 fm = geqoe_step(x_scaled, m, am, model, exhaust_velocity, steps);
      out.b_mat.col(j) = geqoe_scaled_difference(fp, fm) / (2.0 * options.control_step);
    }
  }
  return out;
}

StmPair compute_stm(const Vector6& x_scaled, double m, const ThrustArc& arc, const ForceModel& model,
                    double exhaust_velocity, const StmOptions& options) {
  const CartesianState x0 = geqoe_to_cart(geqoe_unscaled(x_scaled, model.grav), model.grav);
  const PropagationResult nominal = propagate_arc(x0, m, arc, model, exhaust_velocity);
  return compute_stm_on_steps(x_scaled, m, arc, model, exhaust_velocity, nominal.steps, options);
}

}  // namespace ltmpc
