#include "crossflow/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "crossflow/plot.hpp"
#include "crossflow/simulation.hpp"

namespace crossflow {

void ExperimentSpec::validate() const {
  if (radii.empty()) throw ConfigError("radius", "sweep needs at least one radius");
  if (s_dists.empty()) throw ConfigError("s_dist", "sweep needs at least one s_dist");
  for (double r : radii) {
    if (!(r > 0.0)) throw ConfigError("radius", "sweep values must be positive");
  }
  for (double s : s_dists) {
    if (!(s > 0.0)) throw ConfigError("s_dist", "sweep values must be positive");
  }
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
  for (double r : radii) {
    for (double s : s_dists) {
      SimConfig cfg = base;
      cfg.radius = r;
      cfg.s_dist = s;
      cfg.validate();
    }
  }
}

int SweepResult::failed() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(),
                                        [](const SweepPoint& p) { return p.summary.status != "ok"; }));
}

std::string point_stem(double radius, double s_dist) {
  return "run_R" + format_double(radius) + "_s" + format_double(s_dist);
}

namespace {

SweepPoint run_point(const SimConfig& cfg, const std::filesystem::path& dir) {
  SweepPoint p;
  const std::string stem = point_stem(cfg.radius, cfg.s_dist);
  p.summary.radius = cfg.radius;
  p.summary.s_dist = cfg.s_dist;
  p.summary.seed = cfg.seed;
  try {
    const TrajectoryLog log = run_sim(cfg);
    p.log_path = (dir / (stem + ".json")).string();
    write_log_json_file(log, p.log_path);
    p.summary = summarize(log);
  } catch (const SimulationAbort& e) {
    p.summary.status = "aborted";
    p.error = e.what();
    p.diagnostic_path = (dir / (stem + "_abort.txt")).string();
    write_text_file(p.diagnostic_path, std::string(e.what()) + "\n" + e.diagnostic());
  } catch (const std::exception& e) {
    p.summary.status = "error";
    p.error = e.what();
  }
  return p;
}

double delay_or_nan(const SweepPoint& p) {
  return p.summary.average_delay ? *p.summary.average_delay : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec, const SweepProgress& progress) {
  spec.validate();
  const std::filesystem::path dir(spec.out_dir.empty() ? "." : spec.out_dir);
  std::filesystem::create_directories(dir);

  std::vector<SimConfig> grid;
  for (double r : spec.radii) {
    for (double s : spec.s_dists) {
      SimConfig cfg = spec.base;
      cfg.radius = r;
      cfg.s_dist = s;
      grid.push_back(cfg);
    }
  }

  SweepResult result;
  result.points.resize(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  int done = 0;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      result.points[i] = run_point(grid[i], dir);
      std::lock_guard lock(report);
      ++done;
      if (progress) progress(i, result.points[i], done, static_cast<int>(grid.size()));
    }
  };
  const int n = std::min<int>(spec.workers, static_cast<int>(grid.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<RunSummary> rows;
  for (const auto& p : result.points) rows.push_back(p.summary);
  result.csv_path = (dir / "summary.csv").string();
  {
    std::ofstream out(result.csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + result.csv_path + "'");
    write_summary_csv(rows, out);
  }

  const std::size_t ns = spec.s_dists.size();
  LineChart by_radius{"Average delay and solver time vs control radius", "control radius R [m]",
                      "average delay [s]", "total solver time [s]", {}};
  for (std::size_t j = 0; j < ns; ++j) {
    ChartSeries delay{"delay, s_dist = " + format_double(spec.s_dists[j]) + " m", {}, {}, false};
    ChartSeries time{"solver time, s_dist = " + format_double(spec.s_dists[j]) + " m", {}, {}, true};
    for (std::size_t i = 0; i < spec.radii.size(); ++i) {
      const SweepPoint& p = result.points[i * ns + j];
      delay.x.push_back(spec.radii[i]);
      delay.y.push_back(delay_or_nan(p));
      time.x.push_back(spec.radii[i]);
      time.y.push_back(p.summary.status == "ok" ? p.summary.total_solver_time
                                                 : std::numeric_limits<double>::quiet_NaN());
    }
    by_radius.series.push_back(std::move(delay));
    by_radius.series.push_back(std::move(time));
  }
  result.radius_chart_path = (dir / "delay_vs_radius.svg").string();
  write_text_file(result.radius_chart_path, line_chart_svg(by_radius));

  LineChart by_sdist{"Average delay vs intersection separation distance", "s_dist [m]", "average delay [s]", "", {}};
  for (std::size_t i = 0; i < spec.radii.size(); ++i) {
    ChartSeries delay{"R = " + format_double(spec.radii[i]) + " m", {}, {}, false};
    for (std::size_t j = 0; j < ns; ++j) {
      delay.x.push_back(spec.s_dists[j]);
      delay.y.push_back(delay_or_nan(result.points[i * ns + j]));
    }
    by_sdist.series.push_back(std::move(delay));
  }
  result.sdist_chart_path = (dir / "delay_vs_sdist.svg").string();
  write_text_file(result.sdist_chart_path, line_chart_svg(by_sdist));
  return result;
}

}  // namespace crossflow
