#include "ltmpc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ltmpc/mean_elements.hpp"

namespace ltmpc {

namespace {

constexpr double kWidth = 860.0;
constexpr double kPanelHeight = 200.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kGap = 30.0, kBottom = 50.0;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string tick_label(double x, double step) {
  char buf[32];
  const int digits = step >= 1.0 ? 0 : std::min(6, static_cast<int>(std::ceil(-std::log10(step))));
  std::snprintf(buf, sizeof(buf), "%.*f", digits, std::abs(x) < 0.5 * step * 1e-6 ? 0.0 : x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

// Pads a degenerate or empty range and snaps it to a 1-2-5 tick step.
Range nice_range(double lo, double hi, double& step) {
  if (!(lo <= hi)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    const double pad = std::max(1e-9, 0.5 * std::abs(hi));
    lo -= pad;
    hi += pad;
  }
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  step = (r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0) * mag;
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

void extend(double v, double& lo, double& hi) {
  if (!std::isfinite(v)) return;
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

}  // namespace

std::string render_svg(const std::string& title, const std::string& xlabel, const std::vector<Panel>& panels) {
  const double height = kTop + panels.size() * kPanelHeight + (panels.size() - 1) * kGap + kBottom;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanelHeight;

  double xlo = INFINITY, xhi = -INFINITY;
  for (const Panel& p : panels) {
    for (const Series& s : p.series)
      for (double x : s.x) extend(x, xlo, xhi);
    for (const auto& m : p.markers) extend(m.first, xlo, xhi);
  }
  double xstep = 1.0;
  const Range xr = nice_range(xlo, xhi, xstep);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(height) +
         "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double y0 = kTop + pi * (kPanelHeight + kGap);
    double ylo = INFINITY, yhi = -INFINITY;
    for (const Series& s : p.series)
      for (double y : s.y) extend(y, ylo, yhi);
    for (const auto& m : p.markers) extend(m.second, ylo, yhi);
    double ystep = 1.0;
    const Range yr = nice_range(ylo, yhi, ystep);
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return y0 + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    svg += "<g>\n<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(plot_w) + "\" height=\"" +
           fmt(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double y = yr.lo; y <= yr.hi + 0.5 * ystep; y += ystep) {
      svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py(y)) + "\" x2=\"" + fmt(kLeft + plot_w) + "\" y2=\"" +
             fmt(py(y)) + "\" stroke=\"#e0e0e0\"/>\n";
      svg += "<text x=\"" + fmt(kLeft - 4) + "\" y=\"" + fmt(py(y) + 4) + "\" text-anchor=\"end\">" +
             tick_label(y, ystep) + "</text>\n";
    }
    if (pi + 1 == panels.size()) {
      for (double x = xr.lo; x <= xr.hi + 0.5 * xstep; x += xstep) {
        svg += "<text x=\"" + fmt(px(x)) + "\" y=\"" + fmt(y0 + plot_h + 14) + "\" text-anchor=\"middle\">" +
               tick_label(x, xstep) + "</text>\n";
      }
      svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(y0 + plot_h + 32) +
             "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
    }
    svg += "<text transform=\"translate(16," + fmt(y0 + plot_h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape(p.ylabel) + "</text>\n";

    for (double x : p.vlines) {
      svg += "<line class=\"recompute-line\" x1=\"" + fmt(px(x)) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(px(x)) +
             "\" y2=\"" + fmt(y0 + plot_h) + "\" stroke=\"#d62728\" stroke-dasharray=\"2,3\"/>\n";
    }
    double legend_y = y0 + 14;
    for (const Series& s : p.series) {
      std::string pts;
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        pts += fmt(px(s.x[k])) + "," + fmt(py(s.y[k])) + " ";
      }
      if (!pts.empty()) pts.pop_back();
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.2\"" +
             (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + pts + "\"/>\n";
      if (!s.label.empty()) {
        svg += "<text x=\"" + fmt(kLeft + plot_w - 6) + "\" y=\"" + fmt(legend_y) +
               "\" text-anchor=\"end\" fill=\"" + s.color + "\">" + escape(s.label) + "</text>\n";
        legend_y += 13;
      }
    }
    for (const auto& [mx, my] : p.markers) {
      svg += "<circle class=\"recompute\" cx=\"" + fmt(px(mx)) + "\" cy=\"" + fmt(py(my)) +
             "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> emit_plots(const GuidanceLog& log, const ReferenceTrajectory* ref,
                                              const std::filesystem::path& dir) {
  if (log.segments.empty() || log.nodes.empty())
    throw std::invalid_argument("log has no segments; nothing to plot");

  const Gravity grav;
  // Mean elements along the flown path, thinned to keep the files small.
  const std::size_t stride = std::max<std::size_t>(1, log.nodes.size() / 1500);
  Series a_fly, i_fly, o_fly, a_ref, i_ref, o_ref, da, di, dO;
  a_fly.label = "flown";
  a_ref.label = "reference";
  a_ref.color = i_ref.color = o_ref.color = "#ff7f0e";
  a_ref.dashed = i_ref.dashed = o_ref.dashed = true;
  double raan_prev = 0.0, raan_unwrapped = 0.0;
  std::vector<std::size_t> picks;
  for (std::size_t k = 0; k < log.nodes.size(); k += stride) picks.push_back(k);
  if (picks.back() + 1 != log.nodes.size()) picks.push_back(log.nodes.size() - 1);
  for (std::size_t k : picks) {
    const NodeRecord& n = log.nodes[k];
    const KeplerianElements mean = cart_to_mean_kep(n.x, grav);
    const double td = n.t / kSecondsPerDay;
    if (a_fly.x.empty()) {
      raan_unwrapped = mean.raan;
    } else {
      raan_unwrapped += wrap_pi(mean.raan - raan_prev);
    }
    raan_prev = mean.raan;
    a_fly.x.push_back(td), a_fly.y.push_back(mean.a);
    i_fly.x.push_back(td), i_fly.y.push_back(mean.i / kDeg);
    o_fly.x.push_back(td), o_fly.y.push_back(raan_unwrapped / kDeg);
    if (ref) {
      da.x.push_back(td), da.y.push_back(mean.a - ref->interp(ref->a, n.t));
      di.x.push_back(td), di.y.push_back((mean.i - ref->interp(ref->inc, n.t)) / kDeg);
      dO.x.push_back(td), dO.y.push_back(wrap_pi(mean.raan - ref->interp(ref->raan, n.t)) / kDeg);
    }
  }
  if (ref) {
    // Align the unwrapped reference node with the flown branch.
    const double shift = o_fly.y.empty() ? 0.0
                                         : kTwoPi / kDeg * std::round((o_fly.y.front() - ref->raan.front() / kDeg) /
                                                                      (kTwoPi / kDeg));
    for (std::size_t k = 0; k < ref->size(); k += std::max<std::size_t>(1, ref->size() / 1500)) {
      const double td = ref->t[k] / kSecondsPerDay;
      a_ref.x.push_back(td), a_ref.y.push_back(ref->a[k]);
      i_ref.x.push_back(td), i_ref.y.push_back(ref->inc[k] / kDeg);
      o_ref.x.push_back(td), o_ref.y.push_back(ref->raan[k] / kDeg + shift);
    }
  }

  std::vector<Panel> elements(3);
  elements[0].ylabel = "a (km)";
  elements[1].ylabel = "i (deg)";
  elements[2].ylabel = "RAAN (deg)";
  elements[0].series = {a_fly};
  elements[1].series = {i_fly};
  elements[2].series = {o_fly};
  if (ref) {
    elements[0].series.push_back(a_ref);
    elements[1].series.push_back(i_ref);
    elements[2].series.push_back(o_ref);
  }

  std::vector<double> recompute_days;
  for (double t : log.recompute_times) recompute_days.push_back(t / kSecondsPerDay);
  for (Panel& p : elements) p.vlines = recompute_days;

  Panel dvp;
  dvp.ylabel = "dv' (m/s)";
  Series dv_series;
  dv_series.label = "after segment";
  for (const SegmentRecord& s : log.segments) {
    dv_series.x.push_back(s.tf / kSecondsPerDay);
    dv_series.y.push_back(s.dv_prime);
  }
  dvp.series = {dv_series};
  for (double t : log.recompute_times) {
    // Marker sits on the segment whose check triggered it.
    double y = 0.0, best = INFINITY;
    for (const SegmentRecord& s : log.segments) {
      if (std::abs(s.tf - t) < best) best = std::abs(s.tf - t), y = s.dv_prime;
    }
    dvp.markers.emplace_back(t / kSecondsPerDay, y);
  }
  std::vector<Panel> tracking = {dvp};
  if (ref) {
    Panel pa, pi, po;
    pa.ylabel = "da (km)";
    pi.ylabel = "di (deg)";
    po.ylabel = "dRAAN (deg)";
    pa.series = {da};
    pi.series = {di};
    po.series = {dO};
    for (Panel* p : {&pa, &pi, &po}) p->vlines = recompute_days;
    tracking.push_back(pa);
    tracking.push_back(pi);
    tracking.push_back(po);
  }

  const std::string name = log.scenario.empty() ? "run" : log.scenario;
  std::vector<std::filesystem::path> files = {dir / kElementsPlot, dir / kTrackingPlot};
  write_text(files[0], render_svg(name + ": mean elements", "time (d)", elements));
  write_text(files[1], render_svg(name + ": tracking (circles mark recomputations)", "time (d)", tracking));
  return files;
}

std::string sweep_svg(const std::vector<SweepPoint>& points) {
  Series rt, ft, rd, fd;
  rt.label = rd.label = "reference";
  ft.label = fd.label = "flown";
  rt.color = rd.color = "#ff7f0e";
  rt.dashed = rd.dashed = true;
  for (const SweepPoint& p : points) {
    if (!p.ok) continue;
    rt.x.push_back(p.dc_ref), rt.y.push_back(p.ref_tof);
    ft.x.push_back(p.dc_ref), ft.y.push_back(p.tof);
    rd.x.push_back(p.dc_ref), rd.y.push_back(p.ref_dv);
    fd.x.push_back(p.dc_ref), fd.y.push_back(p.dv);
  }
  Panel tof, dv;
  tof.ylabel = "TOF (d)";
  tof.series = {ft, rt};
  dv.ylabel = "dv (m/s)";
  dv.series = {fd, rd};
  return render_svg("DC' sweep", "DC'", {tof, dv});
}

std::string nonlinearity_svg(const NonlinearityReport& report) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
  Panel p;
  p.ylabel = "log10 v";
  for (CoordinateSystem c : kCoordinateSystems) {
    const std::size_t s = static_cast<std::size_t>(c);
    Series ser;
    ser.label = to_string(c);
    ser.color = colors[s];
    for (std::size_t k = 0; k < report.orbits.size(); ++k) {
      ser.x.push_back(report.orbits[k]);
      ser.y.push_back(report.index[s][k] > 0.0 ? std::log10(report.index[s][k]) : NAN);
    }
    p.series.push_back(ser);
  }
  return render_svg("Nonlinearity index (" + report.norm + ")", "orbits", {p});
}

}  // namespace ltmpc
