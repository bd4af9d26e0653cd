#include "ltmpc/atmosphere.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>

namespace ltmpc {

namespace {

struct HpRow {
  double h;
  double rho_min;
  double rho_max;
};

// g/km^3, solar-mean activity.
constexpr std::array<HpRow, 50> kTable{{
    {100.0, 497400.0, 497400.0}, {120.0, 24900.0, 24900.0},   {130.0, 8377.0, 8710.0},
    {140.0, 3899.0, 4059.0},     {150.0, 2122.0, 2215.0},     {160.0, 1263.0, 1344.0},
    {170.0, 800.8, 875.8},       {180.0, 528.3, 601.0},       {190.0, 361.7, 429.7},
    {200.0, 255.7, 316.2},       {210.0, 183.9, 239.6},       {220.0, 134.1, 185.3},
    {230.0, 99.49, 145.5},       {240.0, 74.88, 115.7},       {250.0, 57.09, 93.08},
    {260.0, 44.03, 75.55},       {270.0, 34.30, 61.82},       {280.0, 26.97, 50.95},
    {290.0, 21.39, 42.26},       {300.0, 17.08, 35.26},       {320.0, 10.99, 25.11},
    {340.0, 7.214, 18.19},       {360.0, 4.824, 13.37},       {380.0, 3.274, 9.955},
    {400.0, 2.249, 7.492},       {420.0, 1.558, 5.684},       {440.0, 1.091, 4.355},
    {460.0, 0.7701, 3.362},      {480.0, 0.5474, 2.612},      {500.0, 0.3916, 2.042},
    {520.0, 0.2819, 1.605},      {540.0, 0.2042, 1.267},      {560.0, 0.1488, 1.005},
    {580.0, 0.1092, 0.7997},     {600.0, 0.08070, 0.6390},    {620.0, 0.06012, 0.5123},
    {640.0, 0.04519, 0.4121},    {660.0, 0.03430, 0.3325},    {680.0, 0.02632, 0.2691},
    {700.0, 0.02043, 0.2185},    {720.0, 0.01607, 0.1779},    {740.0, 0.01281, 0.1452},
    {760.0, 0.01036, 0.1190},    {780.0, 0.008496, 0.09776},  {800.0, 0.007069, 0.08059},
    {840.0, 0.004680, 0.05741},  {880.0, 0.003200, 0.04210}, {920.0, 0.002210, 0.03130},
    {960.0, 0.001560, 0.02360},  {1000.0, 0.001150, 0.01810},
}};

double exp_interp(double h, double h0, double h1, double r0, double r1) {
  const double scale = (h0 - h1) / std::log(r1 / r0);
  return r0 * std::exp((h0 - h) / scale);
}

}  // namespace

DensitySample harris_priester_density(double altitude_km) {
  DensitySample out;
  double h = altitude_km;
  if (h < kTable.front().h) {
    h = kTable.front().h;
    out.clamped = true;
  } else if (h > kTable.back().h) {
    h = kTable.back().h;
    out.clamped = true;
  }
  std::size_t j = 0;
  while (j + 2 < kTable.size() && h >= kTable[j + 1].h) ++j;
  const HpRow& lo = kTable[j];
  const HpRow& hi = kTable[j + 1];
  const double rmin = exp_interp(h, lo.h, hi.h, lo.rho_min, hi.rho_min);
  const double rmax = exp_interp(h, lo.h, hi.h, lo.rho_max, hi.rho_max);
  out.rho = 0.5 * (rmin + rmax) * 1e-12;
  return out;
}

double atmospheric_density(double altitude_km) {
  static std::atomic<bool> warned{false};
  const DensitySample s = harris_priester_density(altitude_km);
  if (s.clamped && !warned.exchange(true)) {
    std::fprintf(stderr, "warning: altitude %.1f km outside density table, clamped\n", altitude_km);
  }
  return s.rho;
}

}  // namespace ltmpc
