#pragma once

// Reference generation: Edelbaum transfer, J2 drift-orbit RAAN matching, and
// the forward-propagation adjustment of the thrust profile.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltmpc/delta_v.hpp"
#include "ltmpc/dynamics.hpp"
#include "ltmpc/eclipse.hpp"

namespace ltmpc {

/// Everything the guidance needs to know about the vehicle and its
/// surroundings.
struct Environment {
  ForceModel force;
  SpacecraftConfig sc;
  EclipseModel eclipse;  // eclipse.dc_ref is DC'
  int nodes_per_orbit = 36;
  PropagatorSettings prop;
};

struct TransferTarget {
  double a_f = 0.0;               // km, mean
  std::optional<double> i_f;      // rad, mean
  std::optional<double> raan_f;   // rad, mean, at scenario t = 0
  double raan_rate = 0.0;         // rad/s, filled by calibrate_target

  /// Target elements at scenario time t.
  TargetElements at(double t) const;
};

/// Raised when no transfer satisfying the constraints exists.
class InfeasibleTransfer : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Secular nodal rate: first-order J2 formula times a correction factor
/// measured by propagating the mean orbit, interpolated in semi-major axis.
struct NodalRateModel {
  double a_lo = 0.0, a_hi = 1.0;
  double k_lo = 1.0, k_hi = 1.0;

  double rate(double a, double i, const Gravity& grav) const;
};

/// Mean nodal rate of a circular orbit, from a J2-only propagation of `days`.
double measured_nodal_rate(double a, double i, const Gravity& grav, double days = 5.0);

NodalRateModel calibrate_nodal_rate(double a0, double i0, double a1, double i1, const Gravity& grav);

/// Fills target.raan_rate from a J2-only propagation of the target orbit.
void calibrate_target(TransferTarget& target, const Gravity& grav);

struct EdelbaumTransfer {
  double a0 = 0.0, i0 = 0.0, a_f = 0.0, i_f = 0.0;
  double v0 = 0.0, vf = 0.0;  // km/s
  double dv = 0.0;            // m/s
  double tof = 0.0;           // s
  double beta0 = 0.0;         // rad, angle from the velocity direction, [0, pi]
  double m_start = 0.0;       // kg
  double mdot = 0.0;          // kg/s, duty-averaged
  double ve = 0.0;            // m/s

  double mass_at(double t) const;
  double dv_at(double t) const;  // cumulative, m/s
  /// Out-of-plane steering magnitude after cumulative dv (m/s).
  double beta_at_dv(double dv_c) const;
  double a_at_dv(double dv_c) const;
  double i_at_dv(double dv_c) const;
  /// Duty-averaged thrust acceleration at time t, km/s^2.
  double accel_at(double t) const { return mass_at(t) > 0.0 ? mdot * ve / mass_at(t) * 1e-3 : 0.0; }
};

/// Closed-form Edelbaum transfer flown with duty-averaged thrust DC' * T_max.
/// Throws std::invalid_argument for |i_f - i0| > 90 deg.
EdelbaumTransfer edelbaum_transfer(double a0, double i0, double a_f, double i_f,
                                   const SpacecraftConfig& sc, double dc_ref, double m_start,
                                   double mu = Gravity{}.mu);

/// Node change accumulated over a transfer (rad).
double transfer_node_drift(const EdelbaumTransfer& leg, const NodalRateModel& rates,
                           const Gravity& grav);

struct MeanOrbit {
  double a = 0.0;
  double i = 0.0;
  double raan = 0.0;
};

struct DriftSearchOptions {
  double alt_min = 250.0;              // km
  double alt_max = 800.0;              // km
  double alt_step = 2.0;               // km
  double inc_step = 0.02 * kDeg;
  double inc_margin = 0.5 * kDeg;      // search band beyond the start/target span
  double wait_guard = 0.05 * kSecondsPerDay;  // minimum non-zero wait
  double max_wait = 30.0 * kSecondsPerDay;
  bool refine = true;
};

struct DriftPlan {
  double a_d = 0.0, i_d = 0.0;
  double t_wait = 0.0;  // s
  int revolutions = 0;  // extra 2pi cycles of relative drift
  EdelbaumTransfer leg1, leg2;
  double dv = 0.0;   // m/s, transfers plus drag make-up while waiting
  double tof = 0.0;  // s
};

/// Grid search over drift orbits followed by a pattern search. t_start is the
/// scenario time of the start orbit (target node is propagated to it).
DriftPlan raan_drift_match(const MeanOrbit& start, double m_start, double t_start,
                           const TransferTarget& target, const Environment& env,
                           const NodalRateModel& rates, const DriftSearchOptions& options = {});

/// Direct transfer, no drift phase (node not tracked).
DriftPlan direct_plan(const MeanOrbit& start, double m_start, const TransferTarget& target,
                      const Environment& env);

struct ReferenceTrajectory {
  static constexpr int kVersion = 1;

  std::vector<double> t;       // node times, s (scenario clock)
  std::vector<double> f_t;     // duty-averaged thrust acceleration, km/s^2
  std::vector<double> beta;    // steering angle, signed (+ raises inclination), rad
  std::vector<double> a;       // mean, km
  std::vector<double> inc;     // mean, rad
  std::vector<double> raan;    // mean, rad (unwrapped)
  std::vector<double> dv_cum;  // m/s
  std::vector<double> switch_times;

  double dv_total = 0.0;  // m/s
  double tof = 0.0;       // s
  double dc_ref = 0.4;
  double period = 0.0;    // initial orbital period, s
  int nodes_per_orbit = 36;
  double m0 = 0.0;
  double dv_adjust = 0.0;  // dv_r added by the adjustment, m/s
  DriftPlan plan;

  double t0() const { return t.front(); }
  double tf() const { return t.back(); }
  std::size_t size() const { return t.size(); }
  /// Linear interpolation of a profile, clamped at the ends.
  double interp(const std::vector<double>& y, double time) const;
  TargetElements elements_at(double time, const TransferTarget& target) const;
};

/// Analytic profiles of a plan on the grid t_start : P/N : t_start + tof.
ReferenceTrajectory sample_reference(const DriftPlan& plan, const MeanOrbit& start, double t_start,
                                     const Environment& env, const NodalRateModel& rates);

struct ReferencePropagation {
  CartesianState x_end;
  double m_end = 0.0;
  std::vector<double> switch_times;
  DvPrime dv_prime;  // reached state vs final target
};

/// Forward propagation of the reference thrust from (x0, m0) with the
/// duty-cycle gate and hemisphere steering sign.
ReferencePropagation propagate_reference(const ReferenceTrajectory& ref, const CartesianState& x0,
                                         double m0, const TransferTarget& target,
                                         const Environment& env);

/// Linear dv ramp of size dv_r; the thrust profile is rebuilt from the
/// adjusted mass. dv_r = 0 returns the profile unchanged.
ReferenceTrajectory apply_thrust_adjustment(const ReferenceTrajectory& ref, double dv_r,
                                            const Environment& env);

/// Forward-propagates, adjusts, and merges the switching times into the grid.
ReferenceTrajectory adjust_thrust_profile(const ReferenceTrajectory& ref, const CartesianState& x0,
                                          double m0, const TransferTarget& target,
                                          const Environment& env);

struct ReferenceOptions {
  DriftSearchOptions drift;
  bool adjust = true;
};

/// Complete reference from the current osculating state.
ReferenceTrajectory generate_reference(const CartesianState& x0, double m0,
                                       const TransferTarget& target, const Environment& env,
                                       const ReferenceOptions& options = {});

}  // namespace ltmpc
