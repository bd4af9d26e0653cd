#include "ltmpc/mean_elements.hpp"

#include <array>
#include <complex>

#include "ltmpc/dual.hpp"
#include "ltmpc/gravity.hpp"

namespace ltmpc {

namespace {

constexpr int kSamples = 32;
constexpr int kHarmonics = kSamples / 2 - 1;

Vector6 element_difference(const Vector6& a, const Vector6& b) {
  Vector6 d = a - b;
  d[5] = wrap_pi(d[5]);
  return d;
}

}  // namespace

Vector6 j2_short_period(const ClassicalEquinoctial& mean, const Gravity& grav) {
  if (grav.j2 == 0.0) return Vector6::Zero();
  const double n = std::sqrt(grav.mu / (mean.a * mean.a * mean.a));

  std::array<Vector6, kSamples> rates;
  for (int j = 0; j < kSamples; ++j) {
    ClassicalEquinoctial sample = mean;
    sample.lambda = kTwoPi * j / kSamples;
    const CartesianState x = classical_equinoctial_to_cart(sample, grav.mu);
    const Vector3 acc = j2_acceleration<double>(x.r, grav);
    Vector3T<Dual> r_d, v_d;
    for (int c = 0; c < 3; ++c) {
      r_d[c] = Dual(x.r[c]);
      v_d[c] = Dual(x.v[c], acc[c]);
    }
    const Vector6T<Dual> el = detail::cart_to_classical_equinoctial<Dual>(r_d, v_d, grav.mu);
    for (int c = 0; c < 6; ++c) rates[j][c] = el[c].der;
  }

  // Fourier coefficients of each rate, then integrate in mean longitude.
  using Complex = std::complex<double>;
  std::array<std::array<Complex, kHarmonics + 1>, 6> coeff{};
  for (int m = 1; m <= kHarmonics; ++m) {
    for (int j = 0; j < kSamples; ++j) {
      const Complex phase = std::polar(1.0 / kSamples, -kTwoPi * m * j / kSamples);
      for (int c = 0; c < 6; ++c) coeff[c][m] += rates[j][c] * phase;
    }
  }

  Vector6 delta = Vector6::Zero();
  const double coupling = -1.5 * n / mean.a;
  for (int m = 1; m <= kHarmonics; ++m) {
    const Complex inv_freq = 1.0 / Complex(0.0, m * n);
    const Complex basis = std::polar(1.0, m * mean.lambda);
    std::array<Complex, 6> integral;
    for (int c = 0; c < 5; ++c) integral[c] = coeff[c][m] * inv_freq;
    integral[5] = (coeff[5][m] + coupling * integral[0]) * inv_freq;
    for (int c = 0; c < 6; ++c) delta[c] += 2.0 * (integral[c] * basis).real();
  }
  return delta;
}

ClassicalEquinoctial mean_to_osc(const ClassicalEquinoctial& mean, const Gravity& grav) {
  Vector6 osc = mean.to_vector() + j2_short_period(mean, grav);
  osc[5] = wrap_two_pi(osc[5]);
  return ClassicalEquinoctial::from_vector(osc);
}

ClassicalEquinoctial osc_to_mean(const ClassicalEquinoctial& osc, const Gravity& grav) {
  if (!(std::hypot(osc.f, osc.g) < 0.1)) {
    throw std::domain_error("mean element theory requires e < 0.1");
  }
  const Vector6 target = osc.to_vector();
  Vector6 mean = target;
  for (int it = 0; it < 20; ++it) {
    const Vector6 next_raw =
        target - j2_short_period(ClassicalEquinoctial::from_vector(mean), grav);
    const Vector6 step = element_difference(next_raw, mean);
    mean += step;
    mean[5] = wrap_two_pi(mean[5]);
    const double scale = step[0] / mean[0];
    if (std::abs(scale) < 1e-15 && step.tail<5>().cwiseAbs().maxCoeff() < 1e-15) break;
  }
  return ClassicalEquinoctial::from_vector(mean);
}

KeplerianElements mean_to_osc(const KeplerianElements& mean, const Gravity& grav) {
  return classical_equinoctial_to_kep(mean_to_osc(kep_to_classical_equinoctial(mean), grav),
                                      ElementKind::osculating);
}

KeplerianElements osc_to_mean(const KeplerianElements& osc, const Gravity& grav) {
  return classical_equinoctial_to_kep(osc_to_mean(kep_to_classical_equinoctial(osc), grav),
                                      ElementKind::mean);
}

ClassicalEquinoctial cart_to_mean_equinoctial(const CartesianState& x, const Gravity& grav) {
  return osc_to_mean(cart_to_classical_equinoctial(x, grav.mu), grav);
}

KeplerianElements cart_to_mean_kep(const CartesianState& x, const Gravity& grav) {
  return classical_equinoctial_to_kep(cart_to_mean_equinoctial(x, grav), ElementKind::mean);
}

MeanState mean_state(const CartesianState& x, const Gravity& grav) {
  MeanState s;
  s.kep = cart_to_mean_kep(x, grav);
  s.u = argument_of_latitude(s.kep);
  s.u_rate = j2_latitude_rate(s.kep.a, s.kep.i, grav, s.kep.e);
  return s;
}

double mean_argument_of_latitude(const CartesianState& x, const Gravity& grav) {
  return argument_of_latitude(cart_to_mean_kep(x, grav));
}

}  // namespace ltmpc
