#pragma once

#include <string>
#include <vector>

#include "symode/diagnostics.hpp"
#include "symode/integrate.hpp"

namespace symode {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  std::string y2_label;
  int width = 960;
  int height = 540;
  std::size_t max_points = 2000;  // per-series cap; deterministic stride
};

/// Self-contained SVG line chart. `primary` maps to the left value axis,
/// `secondary` (may be empty) to the right. Either axis switches to a log10
/// scale automatically when its data is strictly positive and spans at least
/// 3 decades. Output bytes are deterministic for identical inputs.
std::string render_plot(const std::vector<PlotSeries>& primary,
                        const std::vector<PlotSeries>& secondary,
                        const PlotOptions& options);

/// Standard scenario figure: every element magnitude on the left axis and
/// |R| on the right.
std::string scenario_plot_svg(const Trajectory& traj,
                              const DiagnosticsSeries& series,
                              const std::string& title);

}  // namespace symode
