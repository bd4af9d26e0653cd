#pragma once

// MPC guidance loop: segment-by-segment convex tracking, forward propagation
// under thrust errors, and reference regeneration when tracking degrades.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltmpc/tracker.hpp"

namespace ltmpc {

struct ThrustErrorModel {
  double p_misthrust = 0.0;  // per segment
  double sigma_t = 0.0;      // fractional
  double sigma_beta = 0.0;   // rad
  std::uint64_t seed = 0;

  bool active() const { return p_misthrust > 0.0 || sigma_t > 0.0 || sigma_beta > 0.0; }
  void validate() const;
};

/// Stateless random source: every draw is a hash of (seed, segment, node,
/// stream), so results do not depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  /// Uniform on (0, 1).
  double uniform(std::uint64_t segment, std::uint64_t node, std::uint64_t stream) const;
  /// Standard normal (Box-Muller on two uniform streams).
  double normal(std::uint64_t segment, std::uint64_t node, std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
};

struct ErroredControls {
  std::vector<Vector3> accels;
  bool misthrust = false;
};

/// Misthrust zeroes the whole segment; otherwise each node gets a magnitude
/// factor (1 + dT) and an out-of-plane angle shift dBeta, keeping the in-plane
/// direction.
ErroredControls apply_thrust_errors(const std::vector<Vector3>& accels, const ThrustErrorModel& model,
                                    std::uint64_t segment_index, bool force_misthrust = false);

struct NodeRecord {
  double t = 0.0;
  CartesianState x;
  double m = 0.0;
  Vector3 a_rtn = Vector3::Zero();  // applied, km/s^2
  int eta = 1;
  double dv_cum = 0.0;  // m/s
};

struct SegmentOutcome {
  CartesianState x;
  double m = 0.0;
  DvPrime dv_prime;
  std::vector<NodeRecord> nodes;  // one per arc, at its start
  double dv = 0.0;                // m/s applied
  double thrust_time = 0.0;       // s with non-zero applied thrust
  double planned_time = 0.0;      // s with non-zero planned thrust
  double span = 0.0;              // s
  int gate_drops = 0;             // planned thrust removed by the real gate
  int bound_violations = 0;       // applied magnitude above T_max / m
};

/// Zero-order hold through the segment arcs. The real duty cycle dc gates
/// each arc from the actual mean state at its midpoint.
SegmentOutcome forward_propagate_segment(const CartesianState& x0, double m0,
                                         const SegmentProblem& problem,
                                         const std::vector<Vector3>& accels, const Environment& env,
                                         double dc, double dv_cum0 = 0.0);

struct GuidanceConfig {
  double epsilon = 2.0;  // m/s
  double dc_ref = 0.4;
  SegmentConfig segment;
  ThrustErrorModel errors;
  double dv_prime_weight = 2.0;
  int forced_misthrust_segments = 0;
  int max_recomputations = 40;
  ReferenceOptions reference;
  SocpSettings socp;

  void validate() const;
};

struct Scenario {
  std::string name;
  std::string epoch = "2022-03-25T00:00:00Z";
  KeplerianElements initial;  // osculating
  SpacecraftConfig sc;
  TransferTarget target;
  GuidanceConfig guidance;

  /// Environment with the force model, eclipse epoch and DC' set up.
  Environment environment() const;
};

struct SegmentRecord {
  int index = 0;
  double t0 = 0.0, tf = 0.0;
  int arcs = 0;
  std::string status;
  int iterations = 0;
  double dv_prime_planned = 0.0;  // cone slack
  double dv_prime = 0.0;          // after propagation
  double dv = 0.0;
  double objective = 0.0;
  double guess_objective = 0.0;
  double guess_dv_prime = 0.0;    // nonlinear, at the guess terminal state
  bool misthrust = false;
  bool recompute = false;
  int gate_drops = 0;
  int bound_violations = 0;
};

struct TerminalSummary {
  double da = 0.0;     // km, reached minus target (mean)
  double di = 0.0;     // deg
  double draan = 0.0;  // deg
  double tof = 0.0;    // d
  double dv = 0.0;     // m/s
  double dv_prime = 0.0;
  double m_final = 0.0;
};

struct GuidanceLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<NodeRecord> nodes;
  std::vector<SegmentRecord> segments;
  std::vector<double> recompute_times;
  double reference_dv = 0.0;   // first reference
  double reference_tof = 0.0;  // d
  int recomputations = 0;
  bool aborted = false;
  std::string message;
  TerminalSummary summary;
};

/// Raised when the reference cannot be regenerated.
class GuidanceFailure : public std::runtime_error {
 public:
  GuidanceFailure(const std::string& what, GuidanceLog partial)
      : std::runtime_error(what), log(std::move(partial)) {}
  GuidanceLog log;
};

/// Optional hook for progress output.
using SegmentObserver = std::function<void(const SegmentRecord&)>;

GuidanceLog run_guidance(const Scenario& scenario, const SegmentObserver& observer = nullptr);

/// Also returns the first reference, for plotting.
GuidanceLog run_guidance(const Scenario& scenario, ReferenceTrajectory* first_reference,
                         const SegmentObserver& observer = nullptr);

}  // namespace ltmpc
