#include "symode/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace symode {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr const char* kSecondaryPalette[] = {"#111111", "#aa3355"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool all_positive = true;

  void absorb(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (!(v > 0.0)) all_positive = false;
  }
  bool valid() const { return lo <= hi; }
};

struct Axis {
  Range range;
  bool log_scale = false;

  void finalize() {
    if (!range.valid()) {
      range.lo = 0.0;
      range.hi = 1.0;
    }
    log_scale = range.all_positive && range.lo > 0.0 &&
                range.hi / range.lo >= 1e3;
    if (!log_scale && range.hi == range.lo) {
      range.lo -= 0.5;
      range.hi += 0.5;
    }
    if (!log_scale) {
      const double pad = 0.05 * (range.hi - range.lo);
      range.lo -= pad;
      range.hi += pad;
    }
  }

  // Fraction in [0,1] from bottom of the axis.
  double fraction(double v) const {
    if (log_scale) {
      const double floor = range.lo * 1e-3;
      const double lv = std::log10(std::max(v, floor));
      return (lv - std::log10(range.lo)) /
             (std::log10(range.hi) - std::log10(range.lo));
    }
    return (v - range.lo) / (range.hi - range.lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log_scale) {
      const int d0 = static_cast<int>(std::ceil(std::log10(range.lo) - 1e-9));
      const int d1 = static_cast<int>(std::floor(std::log10(range.hi) + 1e-9));
      int step = 1;
      while ((d1 - d0) / step > 8) ++step;
      for (int d = d0; d <= d1; d += step) out.push_back(std::pow(10.0, d));
    } else {
      for (int j = 0; j <= 5; ++j) {
        out.push_back(range.lo + (range.hi - range.lo) * j / 5.0);
      }
    }
    return out;
  }
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string px(double v) { return fmt(v, "%.2f"); }

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

PlotSeries downsample(const PlotSeries& series, std::size_t max_points) {
  const std::size_t count = series.x.size();
  if (count <= max_points || max_points < 2) return series;
  PlotSeries thin;
  thin.label = series.label;
  const std::size_t stride = (count + max_points - 1) / max_points;
  for (std::size_t k = 0; k < count; k += stride) {
    thin.x.push_back(series.x[k]);
    thin.y.push_back(series.y[k]);
  }
  if (thin.x.back() != series.x.back()) {
    thin.x.push_back(series.x.back());
    thin.y.push_back(series.y.back());
  }
  return thin;
}

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& primary,
                        const std::vector<PlotSeries>& secondary,
                        const PlotOptions& options) {
  const double width = options.width;
  const double height = options.height;
  const double left = 72, right = secondary.empty() ? 24 : 72;
  const double top = options.title.empty() ? 24 : 44;
  const double bottom = 52;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::vector<PlotSeries> prim, secd;
  for (const auto& s : primary) prim.push_back(downsample(s, options.max_points));
  for (const auto& s : secondary) secd.push_back(downsample(s, options.max_points));

  Axis x_axis, y_axis, y2_axis;
  for (const auto& s : prim) {
    for (double v : s.x) x_axis.range.absorb(v);
    for (double v : s.y) y_axis.range.absorb(v);
  }
  for (const auto& s : secd) {
    for (double v : s.x) x_axis.range.absorb(v);
    for (double v : s.y) y2_axis.range.absorb(v);
  }
  x_axis.range.all_positive = false;  // time axis stays linear
  x_axis.finalize();
  y_axis.finalize();
  y2_axis.finalize();

  const auto map_x = [&](double v) { return left + x_axis.fraction(v) * plot_w; };
  const auto map_y = [&](const Axis& a, double v) {
    return top + (1.0 - a.fraction(v)) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
         fmt(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + px(width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           escape(options.title) + "</text>\n";
  }

  // Grid and ticks.
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : x_axis.ticks()) {
    const double gx = map_x(t);
    svg += "<line x1=\"" + px(gx) + "\" y1=\"" + px(top) + "\" x2=\"" + px(gx) +
           "\" y2=\"" + px(top + plot_h) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + px(gx) + "\" y=\"" + px(top + plot_h + 16) +
           "\" text-anchor=\"middle\">" + fmt(t, "%.4g") + "</text>\n";
  }
  for (double t : y_axis.ticks()) {
    const double gy = map_y(y_axis, t);
    svg += "<line x1=\"" + px(left) + "\" y1=\"" + px(gy) + "\" x2=\"" +
           px(left + plot_w) + "\" y2=\"" + px(gy) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + px(left - 6) + "\" y=\"" + px(gy + 4) +
           "\" text-anchor=\"end\">" + fmt(t, "%.4g") + "</text>\n";
  }
  if (!secd.empty()) {
    for (double t : y2_axis.ticks()) {
      const double gy = map_y(y2_axis, t);
      svg += "<text x=\"" + px(left + plot_w + 6) + "\" y=\"" + px(gy + 4) +
             "\" text-anchor=\"start\">" + fmt(t, "%.4g") + "</text>\n";
    }
  }
  svg += "</g>\n";

  // Frame.
  svg += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" +
         px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

  const auto polyline = [&](const PlotSeries& s, const Axis& axis,
                            const char* color, const char* dash) {
    std::string pts;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      pts += px(map_x(s.x[k])) + "," + px(map_y(axis, s.y[k])) + " ";
    }
    std::string line = "<polyline fill=\"none\" stroke=\"";
    line += color;
    line += "\" stroke-width=\"1.5\"";
    if (dash) {
      line += " stroke-dasharray=\"";
      line += dash;
      line += "\"";
    }
    line += " points=\"" + pts + "\"/>\n";
    return line;
  };
  for (std::size_t i = 0; i < prim.size(); ++i) {
    svg += polyline(prim[i], y_axis, kPalette[i % std::size(kPalette)], nullptr);
  }
  for (std::size_t i = 0; i < secd.size(); ++i) {
    svg += polyline(secd[i], y2_axis,
                    kSecondaryPalette[i % std::size(kSecondaryPalette)], "5,3");
  }

  // Axis labels.
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#111\">\n";
  svg += "<text x=\"" + px(left + plot_w / 2) + "\" y=\"" + px(height - 12) +
         "\" text-anchor=\"middle\">" + escape(options.x_label) + "</text>\n";
  if (!options.y_label.empty()) {
    const std::string label =
        escape(options.y_label) + (y_axis.log_scale ? " (log)" : "");
    svg += "<text x=\"16\" y=\"" + px(top + plot_h / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           px(top + plot_h / 2) + ")\">" + label + "</text>\n";
  }
  if (!secd.empty() && !options.y2_label.empty()) {
    const std::string label =
        escape(options.y2_label) + (y2_axis.log_scale ? " (log)" : "");
    svg += "<text x=\"" + px(width - 14) + "\" y=\"" + px(top + plot_h / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(90 " + px(width - 14) +
           " " + px(top + plot_h / 2) + ")\">" + label + "</text>\n";
  }
  svg += "</g>\n";

  // Legend.
  double ly = top + 14;
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#111\">\n";
  for (std::size_t i = 0; i < prim.size(); ++i) {
    const double lx = left + plot_w - 150;
    svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
           px(lx + 22) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"" +
           kPalette[i % std::size(kPalette)] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + px(lx + 28) + "\" y=\"" + px(ly) + "\">" +
           escape(prim[i].label) + "</text>\n";
    ly += 15;
  }
  for (std::size_t i = 0; i < secd.size(); ++i) {
    const double lx = left + plot_w - 150;
    svg += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" +
           px(lx + 22) + "\" y2=\"" + px(ly - 4) + "\" stroke=\"" +
           kSecondaryPalette[i % std::size(kSecondaryPalette)] +
           "\" stroke-width=\"2\" stroke-dasharray=\"5,3\"/>\n";
    svg += "<text x=\"" + px(lx + 28) + "\" y=\"" + px(ly) + "\">" +
           escape(secd[i].label) + "</text>\n";
    ly += 15;
  }
  svg += "</g>\n";
  svg += "</svg>\n";
  return svg;
}

std::string scenario_plot_svg(const Trajectory& traj,
                              const DiagnosticsSeries& series,
                              const std::string& title) {
  std::vector<PlotSeries> primary(traj.spec.n);
  for (std::size_t i = 0; i < traj.spec.n; ++i) {
    primary[i].label = "E" + std::to_string(i + 1);
    primary[i].x = traj.times;
    primary[i].y.resize(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      primary[i].y[k] = traj.states[k][i];
    }
  }
  std::vector<PlotSeries> secondary(1);
  secondary[0].label = "|R|";
  secondary[0].x = series.times;
  secondary[0].y.resize(series.r.size());
  for (std::size_t k = 0; k < series.r.size(); ++k) {
    secondary[0].y[k] = std::abs(series.r[k]);
  }

  PlotOptions options;
  options.title = title;
  options.y_label = "E";
  options.y2_label = "|R|";
  return render_plot(primary, secondary, options);
}

}  // namespace symode
