#pragma once

#include <span>
#include <string>
#include <vector>

#include "hessbar/problems.hpp"
#include "hessbar/solver.hpp"

namespace hessbar {

enum class PlotKind { ValueVsIter, LogLogGap, Trajectory2D };

// One named trace on a figure.
struct TraceSeries {
  std::string label;
  std::vector<IterationRecord> trace;
};

// Self-contained SVG renderers (no external tooling). Long traces are
// stride-downsampled to a bounded point count, keeping the final record.
// All renderers throw ConfigError when given nothing to draw.

// f against k, linear axes.
std::string render_value_plot(std::span<const TraceSeries> series);

// log10(f - f_infinity) against log10 k over the positive-gap records with
// k >= 1; a straight line of slope -rho is the power-law signature.
std::string render_loglog_gap_plot(std::span<const TraceSeries> series,
                                   double f_infinity);

// Iterate path in original box coordinates. Requires a two-dimensional
// box-lifted problem and a report with recorded iterates; throws
// UnsupportedKind otherwise.
std::string render_trajectory_plot(const Problem& problem, const SolveReport& report);

}  // namespace hessbar
