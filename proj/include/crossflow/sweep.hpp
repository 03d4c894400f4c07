#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/metrics.hpp"

namespace crossflow {

struct ExperimentSpec {
  SimConfig base;
  std::vector<double> radii;
  std::vector<double> s_dists;
  std::string out_dir;
  int workers = 1;

  // Throws ConfigError for empty or non-positive axes, a non-positive worker
  // count, or an invalid base configuration at any grid point.
  void validate() const;
};

struct SweepPoint {
  RunSummary summary;  // status "ok" or "aborted"
  std::string log_path;
  std::string diagnostic_path;  // set for aborted points
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // radius-major grid order
  std::string csv_path;
  std::string radius_chart_path;
  std::string sdist_chart_path;
  int failed() const;
};

// Called from worker threads after each point, serialized by the sweep.
using SweepProgress = std::function<void(std::size_t index, const SweepPoint&, int done, int total)>;

// Runs every (R, s_dist) point with the same seed, writing per-point logs,
// summary.csv, delay_vs_radius.svg and delay_vs_sdist.svg into out_dir (which
// is created if missing). Aborted points are recorded and the sweep carries on.
SweepResult run_sweep(const ExperimentSpec& spec, const SweepProgress& progress = {});

// File stem used for one grid point, e.g. "run_R120_s4".
std::string point_stem(double radius, double s_dist);

}  // namespace crossflow
