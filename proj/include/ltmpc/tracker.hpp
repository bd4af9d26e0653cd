#pragma once

// Single-pass convex tracking of the reference over one MPC segment.
//
// The segment covers n orbits of reference nodes. Each reference interval is
// split where the predicted duty-cycle gates or the steering hemisphere
// change, so every sub-arc has one thrust vector held in the RTN frame of its
// start. The nonlinear guess is linearised once in scaled GEqOE and the
// resulting cone program is condensed onto the controls.

#include <vector>

#include "ltmpc/reference.hpp"
#include "ltmpc/socp.hpp"
#include "ltmpc/stm.hpp"

namespace ltmpc {

using Matrix36 = Eigen::Matrix<double, 3, 6>;

struct SegmentConfig {
  int n_orbits = 5;
  int nodes_per_orbit = 36;

  int nodes() const { return n_orbits * nodes_per_orbit; }
  void validate() const;
};

/// Index of the last reference node of the segment starting at `first`.
std::size_t segment_end(const ReferenceTrajectory& ref, std::size_t first, const SegmentConfig& seg);

/// Nonlinear guess. Arrays indexed by node have K + 1 entries, arrays indexed
/// by arc have K.
struct SegmentGuess {
  std::vector<double> t;
  std::vector<CartesianState> states;
  std::vector<Vector6> geqoe;   // scaled
  std::vector<double> masses;   // kg
  std::vector<Vector3> accels;  // RTN km/s^2; the final node carries none (zero)
  std::vector<int> eta_plan;    // DC' gate used by the guess
  std::vector<int> eta;         // DC gate, defines the thrust bounds
  std::vector<std::vector<double>> steps;  // integrator steps per arc

  std::size_t arcs() const { return t.empty() ? 0 : t.size() - 1; }
};

/// Algorithm-2 style guess over reference nodes [first, last], started from
/// the actual state (x0, m0) at ref.t[first].
SegmentGuess initial_guess_segment(const CartesianState& x0, double m0,
                                   const ReferenceTrajectory& ref, std::size_t first,
                                   std::size_t last, const Environment& env, double dc);

struct SegmentProblem {
  std::vector<double> dt;
  std::vector<StmPair> stm_chain;
  std::vector<Vector6> x_guess;  // scaled GEqOE, K + 1
  std::vector<Vector3> a_guess;  // km/s^2, K
  std::vector<double> masses;    // guess, K + 1
  std::vector<double> bounds;    // km/s^2, eta * T_max / m
  Vector6 x0 = Vector6::Zero();
  double t0 = 0.0, tf = 0.0;
  TargetElements target;
  Matrix36 dv_jacobian = Matrix36::Zero();  // m/s per scaled GEqOE unit
  Vector3 dv_guess = Vector3::Zero();       // nonlinear, at the guess terminal state
  double dv_prime_weight = 1.0;
  double accel_unit = Gravity{}.accel_unit();  // km/s^2 per canonical unit

  std::size_t arcs() const { return dt.size(); }
};

/// Delta-v' components of a scaled GEqOE state against a mean target.
Vector3 dv_prime_components(const Vector6& x_scaled, const TargetElements& target,
                            const Gravity& grav);

SegmentProblem build_segment_problem(const SegmentGuess& guess, const ReferenceTrajectory& ref,
                                     const TransferTarget& transfer, const Environment& env,
                                     double dv_prime_weight = 1.0);

/// Linear rollout of the segment dynamics from the guess anchor.
std::vector<Vector6> linear_states(const SegmentProblem& p, const std::vector<Vector3>& accels);

/// Largest residual of x(i+1) = x̂(i+1) + A(i)(x(i) - x̂(i)) + B(i)(a(i) - â(i)).
double dynamics_residual(const SegmentProblem& p, const std::vector<Vector6>& states,
                         const std::vector<Vector3>& accels);

struct SegmentSolution {
  std::vector<Vector3> accels;   // RTN km/s^2, K
  double dv_segment = 0.0;       // m/s
  double dv_prime = 0.0;         // m/s, cone slack
  double objective = 0.0;        // dv_segment + w * dv_prime
  Vector6 x_terminal = Vector6::Zero();  // linear prediction, scaled GEqOE
  SolverStatus status = SolverStatus::max_iter;
  int iterations = 0;
};

SegmentSolution solve_segment(const SegmentProblem& p, const SocpSettings& settings = {});

/// Guess cost in the same objective.
double guess_objective(const SegmentProblem& p);

}  // namespace ltmpc
