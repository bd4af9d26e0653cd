#pragma once

// Studies built on top of the guidance loop: the DC' trade sweep and the
// nonlinearity index of the candidate state representations.

#include <array>
#include <string>
#include <vector>

#include "ltmpc/io.hpp"

namespace ltmpc {

struct SweepPoint {
  double dc_ref = 0.0;
  bool ok = false;
  std::string error;      // filled when the run failed
  double ref_tof = 0.0;   // d
  double tof = 0.0;       // d
  double ref_dv = 0.0;    // m/s
  double dv = 0.0;        // m/s
  int recomputations = 0;
};

/// Error-free guidance at each DC'. A failing point is recorded and the sweep
/// moves on.
std::vector<SweepPoint> dcprime_sweep(const Scenario& scenario, const std::vector<double>& dc_values);

/// Columns: dc_ref, ok, ref_tof_d, tof_d, ref_dv_ms, dv_ms, recomputations, error.
std::string sweep_to_csv(const std::vector<SweepPoint>& points);
Json sweep_to_json(const std::vector<SweepPoint>& points);

enum class CoordinateSystem { cartesian, keplerian, classical_equinoctial, modified_equinoctial, geqoe };

inline constexpr std::array<CoordinateSystem, 5> kCoordinateSystems = {
    CoordinateSystem::cartesian, CoordinateSystem::keplerian, CoordinateSystem::classical_equinoctial,
    CoordinateSystem::modified_equinoctial, CoordinateSystem::geqoe};

const char* to_string(CoordinateSystem c);

/// Element vector in canonical units (lengths in DU, rates in 1/TU, angles in
/// rad). Keplerian uses the mean anomaly.
Vector6 coordinates(CoordinateSystem c, const CartesianState& x, const Gravity& grav);

/// d(coordinates)/d(canonical Cartesian), central differences.
Matrix6 coordinate_jacobian(CoordinateSystem c, const CartesianState& x, const Gravity& grav);

struct NonlinearityOptions {
  double sigma_r = 1.0;     // km
  double sigma_v = 1e-3;    // km/s
  int orbits = 15;
  int samples = 16;
  std::uint64_t seed = 0;
};

struct NonlinearityReport {
  std::vector<int> orbits;                   // 1..N
  std::array<std::vector<double>, 5> index;  // per system, per orbit count
  std::string norm = "2-norm";
  double sigma_r = 0.0, sigma_v = 0.0;
  int samples = 0;

  double at(CoordinateSystem c, int orbit) const;
};

/// Cartesian STM (canonical units) of J2-only motion from variational
/// equations, sampled every `period` seconds (osculating period of x0 when
/// period <= 0). Entry k is the STM after k + 1 periods.
std::vector<std::pair<CartesianState, Matrix6>> j2_stm_per_orbit(const CartesianState& x0, int orbits,
                                                                 const Gravity& grav, double period = 0.0);

/// v = max_i ||A(x_i) - A(x)|| / ||A(x)|| over perturbed initial states x_i on
/// the uncertainty ellipsoid, with A the STM expressed in each system.
NonlinearityReport nonlinearity_index(const CartesianState& x0, const NonlinearityOptions& options,
                                      const Gravity& grav = Gravity::earth());

std::string nonlinearity_to_csv(const NonlinearityReport& r);
Json nonlinearity_to_json(const NonlinearityReport& r);

}  // namespace ltmpc
