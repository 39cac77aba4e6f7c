#include "hessbar/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hessbar/errors.hpp"

namespace hessbar {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 74, kRight = 24, kTop = 44, kBottom = 56;
constexpr std::size_t kMaxPointsPerSeries = 2000;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

struct XySeries {
  std::string label;
  std::vector<double> x, y;
};

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {  // nothing included
      lo = 0.0;
      hi = 1.0;
      return;
    }
    if (lo == hi) {
      const double bump = (lo == 0.0) ? 1.0 : std::abs(lo) * 0.1;
      lo -= bump;
      hi += bump;
      return;
    }
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
};

// Tick positions at 1/2/5 x 10^k steps targeting about five intervals.
std::vector<double> linear_ticks(const Range& r) {
  const double span = r.hi - r.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= mult * mag) {
      step = mult * mag;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(r.lo / step) * step;
  for (double t = first; t <= r.hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    if (ticks.size() > 20) break;
  }
  return ticks;
}

// Integer decades inside the (log10-space) range, or thirds of a short range.
std::vector<double> log_ticks(const Range& r) {
  std::vector<double> ticks;
  for (double d = std::ceil(r.lo); d <= std::floor(r.hi) + 1e-9; d += 1.0)
    ticks.push_back(d);
  if (ticks.size() >= 2) return ticks;
  ticks = {r.lo, 0.5 * (r.lo + r.hi), r.hi};
  return ticks;
}

std::string log_tick_label(double exponent) {
  const double rounded = std::round(exponent);
  if (std::abs(exponent - rounded) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(rounded));
    return buf;
  }
  return num(std::pow(10.0, exponent));
}

// Generic scatter-line figure; inputs are already in axis space (log values
// pre-transformed), `log_x`/`log_y` only switch the tick labeling.
std::string render_figure(const std::vector<XySeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          bool log_x, bool log_y, bool mark_endpoints = false) {
  Range rx, ry;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rx.include(s.x[i]);
      ry.include(s.y[i]);
    }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto sy = [&](double v) { return kTop + plot_h - (v - ry.lo) / (ry.hi - ry.lo) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
         num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         escape_xml(title) + "</text>\n";

  const auto x_ticks = log_x ? log_ticks(rx) : linear_ticks(rx);
  const auto y_ticks = log_y ? log_ticks(ry) : linear_ticks(ry);
  for (double t : x_ticks) {
    const double px = sx(t);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px) +
           "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           (log_x ? log_tick_label(t) : num(t)) + "</text>\n";
  }
  for (double t : y_ticks) {
    const double py = sy(t);
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(kLeft + plot_w) + "\" y2=\"" + num(py) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           (log_y ? log_tick_label(t) : num(t)) + "</text>\n";
  }
  // Axes frame over the grid.
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         escape_xml(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " +
         num(kTop + plot_h / 2) + ")\">" + escape_xml(y_label) + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      points += num(sx(s.x[i]));
      points += ',';
      points += num(sy(s.y[i]));
      points += ' ';
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.6\" points=\"" + points + "\"/>\n";
    if (mark_endpoints && !s.x.empty()) {
      svg += "<circle cx=\"" + num(sx(s.x.front())) + "\" cy=\"" + num(sy(s.y.front())) +
             "\" r=\"4\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.6\"/>\n";
      svg += "<circle cx=\"" + num(sx(s.x.back())) + "\" cy=\"" + num(sy(s.y.back())) +
             "\" r=\"4\" fill=\"" + color + "\"/>\n";
    }
  }

  // Legend, top-right inside the frame.
  const double legend_x = kLeft + plot_w - 150;
  double legend_y = kTop + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    svg += "<line x1=\"" + num(legend_x) + "\" y1=\"" + num(legend_y - 4) + "\" x2=\"" +
           num(legend_x + 24) + "\" y2=\"" + num(legend_y - 4) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(legend_x + 30) + "\" y=\"" + num(legend_y) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape_xml(series[si].label) +
           "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

void downsample(XySeries& s) {
  if (s.x.size() <= kMaxPointsPerSeries) return;
  const std::size_t stride = (s.x.size() + kMaxPointsPerSeries - 1) / kMaxPointsPerSeries;
  std::vector<double> nx, ny;
  for (std::size_t i = 0; i < s.x.size(); i += stride) {
    nx.push_back(s.x[i]);
    ny.push_back(s.y[i]);
  }
  if (nx.back() != s.x.back() || ny.back() != s.y.back()) {
    nx.push_back(s.x.back());
    ny.push_back(s.y.back());
  }
  s.x = std::move(nx);
  s.y = std::move(ny);
}

}  // namespace

std::string render_value_plot(std::span<const TraceSeries> series) {
  if (series.empty()) throw ConfigError("plot: no series given");
  std::vector<XySeries> xy;
  for (const TraceSeries& ts : series) {
    if (ts.trace.empty()) throw ConfigError("plot: series '" + ts.label + "' is empty");
    XySeries s;
    s.label = ts.label;
    for (const IterationRecord& rec : ts.trace) {
      s.x.push_back(static_cast<double>(rec.k));
      s.y.push_back(rec.f_value);
    }
    downsample(s);
    xy.push_back(std::move(s));
  }
  return render_figure(xy, "Objective value per iteration", "iteration k", "f", false,
                       false);
}

std::string render_loglog_gap_plot(std::span<const TraceSeries> series,
                                   double f_infinity) {
  if (series.empty()) throw ConfigError("plot: no series given");
  std::vector<XySeries> xy;
  bool any_points = false;
  for (const TraceSeries& ts : series) {
    if (ts.trace.empty()) throw ConfigError("plot: series '" + ts.label + "' is empty");
    XySeries s;
    s.label = ts.label;
    for (const IterationRecord& rec : ts.trace) {
      if (rec.k < 1) continue;
      const double gap = rec.f_value - f_infinity;
      if (!(gap > 0.0)) continue;
      s.x.push_back(std::log10(static_cast<double>(rec.k)));
      s.y.push_back(std::log10(gap));
    }
    downsample(s);
    any_points = any_points || !s.x.empty();
    xy.push_back(std::move(s));
  }
  if (!any_points)
    throw ConfigError("plot: no positive optimality gaps to draw on a log scale");
  return render_figure(xy, "Optimality gap, log-log", "iteration k", "f - f_inf", true,
                       true);
}

std::string render_trajectory_plot(const Problem& problem, const SolveReport& report) {
  if (!problem.box_lift() || problem.box_lift()->box_dimension() != 2)
    throw UnsupportedKind(
        "trajectory plot: needs a two-dimensional boxed problem with an unlift map");
  if (report.iterates.empty())
    throw ConfigError(
        "trajectory plot: no recorded iterates (enable iterate recording in the solve)");
  XySeries s;
  s.label = "iterates";
  for (const Vec& x : report.iterates) {
    const Vec z = problem.box_lift()->unlift(x);
    s.x.push_back(z[0]);
    s.y.push_back(z[1]);
  }
  downsample(s);
  std::vector<XySeries> xy{std::move(s)};
  if (problem.known_optimum()) {
    // A second one-point series marks the optimum in box coordinates.
    const Vec z = problem.box_lift()->unlift(problem.known_optimum()->x_star);
    XySeries target;
    target.label = "optimum";
    target.x = {z[0]};
    target.y = {z[1]};
    xy.push_back(std::move(target));
  }
  return render_figure(xy, "Iterate trajectory", "x1", "x2", false, false, true);
}

}  // namespace hessbar
