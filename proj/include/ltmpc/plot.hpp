#pragma once

// Static SVG figures of a guidance run. Output is byte-deterministic.

#include <filesystem>
#include <string>
#include <vector>

#include "ltmpc/analysis.hpp"

namespace ltmpc {

struct Series {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::string label;
};

struct Panel {
  std::string ylabel;
  std::vector<Series> series;
  std::vector<std::pair<double, double>> markers;  // circles, class "recompute"
  std::vector<double> vlines;                      // dashed verticals
};

/// Stacked panels sharing the x axis.
std::string render_svg(const std::string& title, const std::string& xlabel, const std::vector<Panel>& panels);

inline constexpr const char* kElementsPlot = "elements.svg";
inline constexpr const char* kTrackingPlot = "tracking.svg";

/// Writes elements.svg (mean a, i, node against the reference) and
/// tracking.svg (dv' per segment and element errors, recomputations circled).
/// `ref` may be null, in which case the reference curves and errors are
/// omitted. Throws std::invalid_argument for a log without segments.
std::vector<std::filesystem::path> emit_plots(const GuidanceLog& log, const ReferenceTrajectory* ref,
                                              const std::filesystem::path& dir);

/// TOF and dv against DC', reference and flown. Failed points are skipped.
std::string sweep_svg(const std::vector<SweepPoint>& points);

/// log10 of the index against orbits, one curve per system.
std::string nonlinearity_svg(const NonlinearityReport& report);

}  // namespace ltmpc
