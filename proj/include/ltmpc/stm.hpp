#pragma once

// State transition matrices of the GEqOE step map, by central differences.
//
// States are scaled GEqOE vectors (see geqoe_scaled). Controls are RTN
// accelerations in canonical units (Earth radii per canonical time squared).

#include <vector>

#include "ltmpc/dynamics.hpp"
#include "ltmpc/geqoe.hpp"

namespace ltmpc {

using Matrix63 = Eigen::Matrix<double, 6, 3>;

struct StmPair {
  Matrix6 a_mat = Matrix6::Identity();
  Matrix63 b_mat = Matrix63::Zero();
};

struct StmOptions {
  double state_step = 1e-4;    // scaled GEqOE units
  double control_step = 1e-5;  // canonical acceleration units
};

/// Nonlinear step map: scaled GEqOE at the start of arc -> scaled GEqOE at its
/// end, evaluated on the fixed step sequence.
Vector6 geqoe_step(const Vector6& x_scaled, double m, const ThrustArc& arc, const ForceModel& model,
                   double exhaust_velocity, const std::vector<double>& steps);

/// Linearisation about (x_scaled, arc.a_rtn) on the given step sequence.
StmPair compute_stm_on_steps(const Vector6& x_scaled, double m, const ThrustArc& arc,
                             const ForceModel& model, double exhaust_velocity,
                             const std::vector<double>& steps,
                    const StmOptions& options = {});

/// As above, with the step sequence taken from an adaptive nominal run.
StmPair compute_stm(const Vector6& x_scaled, double m, const ThrustArc& arc, const ForceModel& model,
                    double exhaust_velocity, const StmOptions& options = {});

}  // namespace ltmpc
