#pragma once

// Primal-dual interior-point solver for the segment tracking cone program
//
//   minimize    sum_k c_k t_k + w * tau
//   subject to  ||u_k|| <= t_k <= b_k                 (per node)
//               || d + sum_k H_k u_k || <= tau         (terminal)
//
// with u_k in R^3. Nesterov-Todd scaling, Mehrotra predictor-corrector. The
// Newton system is block-diagonal per node plus a rank-4 terminal coupling,
// reduced to a 4x4 system plus a scalar Schur complement each iteration.

#include <vector>

#include "ltmpc/elements.hpp"

namespace ltmpc {

struct TrackingSocp {
  std::vector<double> cost;   // c_k >= 0
  std::vector<double> bound;  // b_k; zero removes the node
  std::vector<Matrix3> gain;  // H_k
  Vector3 offset = Vector3::Zero();  // d
  double terminal_weight = 1.0;      // w

  std::size_t size() const { return cost.size(); }
};

// inaccurate: stalled above tol but within 1e-5, usable as a solution.
enum class SolverStatus { optimal, inaccurate, infeasible, max_iter };

const char* to_string(SolverStatus s);

struct SocpSettings {
  double tol = 1e-8;
  int max_iter = 200;
  int refinement = 2;
};

struct SocpResult {
  std::vector<Vector3> u;
  std::vector<double> t;
  double tau = 0.0;
  double objective = 0.0;
  SolverStatus status = SolverStatus::max_iter;
  int iterations = 0;
  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  double gap = 0.0;
};

SocpResult solve_tracking_socp(const TrackingSocp& problem, const SocpSettings& settings = {});

}  // namespace ltmpc
