#pragma once

// Dependency-free SVG 1.1 charts. Output is byte-stable: coordinates are
// printed with two decimals and elements appear in input order.
//
// Every chart uses a fixed 960x600 viewport. The plot area spans
// x in [80, 880] and y in [60, 520]; data coordinates map linearly onto it,
// with larger y values drawn higher.

#include <optional>
#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/trajectory_log.hpp"

namespace crossflow {

// Time on the horizontal axis, lane-frame position on the vertical axis, one
// polyline per agent of the chosen lane. Dashed green lines mark +-R and a
// dashed gray line marks the intersection.
std::string spacetime_svg(const TrajectoryLog& log, Lane lane);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN entries leave a gap in the line
  bool right_axis = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string right_label;  // empty when no series uses the right axis
  std::vector<ChartSeries> series;
};

std::string line_chart_svg(const LineChart& chart);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace crossflow
