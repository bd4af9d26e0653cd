#pragma once

// Delta-v' tracking metric: maximum-rate Gauss estimate of the impulse needed
// to close the gap in semi-major axis and in the inclination vector.

#include <optional>

#include "ltmpc/elements.hpp"

namespace ltmpc {

struct DvPrime {
  Vector3 components = Vector3::Zero();  // (dv_a, dv_h, dv_k), m/s
  double magnitude = 0.0;                // m/s
};

/// Both arguments are mean classical equinoctial elements; only a, f, g, h, k
/// are used. Gaps are target minus current.
DvPrime delta_v_prime(const ClassicalEquinoctial& current, const ClassicalEquinoctial& target, double mu);

/// Mean target orbit. Absent inclination or node means "not tracked".
struct TargetElements {
  double a = 0.0;                 // km
  std::optional<double> i;        // rad
  std::optional<double> raan;     // rad, at the instant being compared
};

/// Circular target elements. Untracked components are copied from current so
/// that they contribute no gap.
ClassicalEquinoctial resolve_target(const TargetElements& target, const ClassicalEquinoctial& current);

}  // namespace ltmpc
