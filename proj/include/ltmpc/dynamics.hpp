#pragma once

// Low-fidelity force model (two-body, J2, drag, thrust) and numerical
// propagation of position, velocity and mass.

#include <functional>
#include <stdexcept>
#include <vector>

#include "ltmpc/constants.hpp"
#include "ltmpc/elements.hpp"

namespace ltmpc {

struct SpacecraftConfig {
  double m0 = 800.0;        // kg
  double t_max = 0.060;     // N
  double isp = 1300.0;      // s
  double g0 = kStandardGravity;
  double duty_cycle = 0.5;  // DC
  double cd = 2.2;
  double area = 0.01;       // m^2

  double exhaust_velocity() const { return isp * g0; }  // m/s
  /// Maximum thrust acceleration at mass m, km/s^2.
  double max_accel(double m) const { return t_max / m * 1e-3; }
  void validate() const;
};

/// J2 is active whenever grav.j2 != 0; the same Gravity defines the GEqOE
/// potential, so the two stay consistent.
struct ForceModel {
  Gravity grav;
  bool drag = true;
  double cd = 2.2;
  double area = 0.01;  // m^2

  static ForceModel for_spacecraft(const SpacecraftConfig& sc) {
    ForceModel f;
    f.cd = sc.cd;
    f.area = sc.area;
    return f;
  }
  static ForceModel two_body() {
    ForceModel f;
    f.grav = Gravity::two_body();
    f.drag = false;
    return f;
  }
  static ForceModel j2_only() {
    ForceModel f;
    f.drag = false;
    return f;
  }
};

/// Thrust direction handling over a propagation arc.
///  rotating: RTN basis re-evaluated along the trajectory.
///  held:     RTN basis of the arc's initial state, fixed in inertial space.
enum class ThrustFrame { rotating, held };

/// Inertial acceleration (km/s^2) at state x, mass m (kg), with the RTN thrust
/// acceleration a_rtn (km/s^2) rotated with the local RTN basis.
Vector3 total_acceleration(const CartesianState& x, double m, const Vector3& a_rtn,
                           const ForceModel& model);

/// Natural (non-thrust) acceleration only.
Vector3 natural_acceleration(const Vector3& r, const Vector3& v, double m, const ForceModel& model);

struct PropagatorSettings {
  double rel_tol = 1e-11;
  double abs_tol = 1e-12;
  double min_altitude = 80.0;  // km
  long max_steps = 2000000;
};

struct ThrustArc {
  double dt = 0.0;                     // s
  Vector3 a_rtn = Vector3::Zero();     // km/s^2
  double eta = 1.0;                    // 0 or 1
  ThrustFrame frame = ThrustFrame::held;
};

struct PropagationResult {
  CartesianState x;
  double m = 0.0;
  std::vector<double> steps;  // accepted step sizes, s
};

/// Raised when integration fails; carries the last successfully reached state.
class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, CartesianState last, double last_mass)
      : std::runtime_error(what), last_state(std::move(last)), mass(last_mass) {}
  CartesianState last_state;
  double mass;
};

/// (t, x, m) after each accepted step.
using StepObserver = std::function<void(double, const CartesianState&, double)>;

/// Adaptive RKF7(8) propagation of one arc. x0.epoch advances by arc.dt.
PropagationResult propagate_arc(const CartesianState& x0, double m0, const ThrustArc& arc,
                                const ForceModel& model, double exhaust_velocity,
                                const PropagatorSettings& settings = {},
                                const StepObserver& observer = nullptr);

/// Same map evaluated on a prescribed step sequence (no error control). Used
/// for finite differencing, where a fixed discretisation keeps the map smooth.
PropagationResult replay_arc(const CartesianState& x0, double m0, const ThrustArc& arc,
                             const ForceModel& model, double exhaust_velocity,
                             const std::vector<double>& steps);

/// Zero-order-hold propagation through a sequence of arcs.
PropagationResult propagate(const CartesianState& x0, double m0, const std::vector<ThrustArc>& arcs,
                            const ForceModel& model, double exhaust_velocity,
                            const PropagatorSettings& settings = {});

}  // namespace ltmpc
