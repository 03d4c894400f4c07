// Command-line front end. Talks to the simulator only through the C API.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crossflow/crossflow.h"

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kSolverAbort = 3,
  kSweepFailures = 4,
  kViolations = 5,
};

struct Handle {
  cf_config* config = nullptr;
  ~Handle() { cf_config_destroy(config); }
};

struct LogHandle {
  cf_log* log = nullptr;
  ~LogHandle() { cf_log_destroy(log); }
};

// Flags shared by run and sweep; applied on top of --config.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> radius, s_dist, d_safe, seed, duration, horizon, dt;
  bool fixed_crossing_order = false;
  std::vector<std::string> overrides;  // key=value

  void add_to(CLI::App* app, bool with_grid_axes) {
    app->add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    if (!with_grid_axes) {
      app->add_option("--radius", radius, "control region radius [m]");
      app->add_option("--s-dist", s_dist, "intersection separation distance [m]");
    }
    app->add_option("--d-safe", d_safe, "same-lane safe distance [m]");
    app->add_option("--seed", seed, "spawner seed");
    app->add_option("--duration", duration, "simulated time [s]");
    app->add_option("--horizon", horizon, "prediction horizon N [steps]");
    app->add_option("--dt", dt, "time step [s]");
    app->add_flag("--fixed-crossing-order", fixed_crossing_order, "one crossing-order binary per pair");
    app->add_option("--set", overrides, "any configuration key, as key=value")->take_all();
  }
};

int report(cf_status status) {
  std::fprintf(stderr, "error: %s: %s\n", cf_status_name(status), cf_last_error());
  if (status == CF_ERR_CONFIG || status == CF_ERR_INVALID_ARGUMENT) return kUsage;
  return kFailure;
}

cf_status build_config(const ConfigFlags& f, cf_config** out) {
  cf_status st = cf_config_create(out);
  if (st != CF_OK) return st;
  if (!f.config_path.empty() && (st = cf_config_load_file(*out, f.config_path.c_str())) != CF_OK) return st;
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"radius", &f.radius}, {"s_dist", &f.s_dist},     {"d_safe", &f.d_safe}, {"seed", &f.seed},
      {"duration", &f.duration}, {"horizon", &f.horizon}, {"dt", &f.dt},
  };
  for (const auto& [key, value] : flags) {
    if (*value && (st = cf_config_set(*out, key, (*value)->c_str())) != CF_OK) return st;
  }
  if (f.fixed_crossing_order && (st = cf_config_set(*out, "fixed_crossing_order", "true")) != CF_OK) return st;
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return CF_ERR_INVALID_ARGUMENT;
    }
    if ((st = cf_config_set(*out, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) != CF_OK) return st;
  }
  return cf_config_validate(*out);
}

std::string config_value(const cf_config* cfg, const char* key) {
  char buf[128];
  return cf_config_get(cfg, key, buf, sizeof buf, nullptr) == CF_OK ? buf : "";
}

std::string format_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_summary(const cf_summary& s) {
  std::printf("radius %g m, s_dist %g m, seed %llu\n", s.radius, s.s_dist, static_cast<unsigned long long>(s.seed));
  std::printf("agents spawned %d, completed %d\n", s.agents_spawned, s.agents_completed);
  if (s.has_average_delay) std::printf("average delay %s s\n", format_seconds(s.average_delay).c_str());
  std::printf("solver time total %s s, per tick mean %s s, max %s s\n", format_seconds(s.total_solver_time).c_str(),
              format_seconds(s.mean_tick_solver_time).c_str(), format_seconds(s.max_tick_solver_time).c_str());
  std::printf("min same-lane gap %g m, min cross separation %g m\n", s.min_gap, s.min_cross_sep);
}

int cmd_run(const ConfigFlags& flags, const std::string& out_dir, const std::string& log_path_flag) {
  Handle h;
  if (cf_status st = build_config(flags, &h.config); st != CF_OK) return report(st);
  std::filesystem::create_directories(out_dir);
  const std::string stem =
      "run_R" + config_value(h.config, "radius") + "_s" + config_value(h.config, "s_dist");

  LogHandle lh;
  const cf_status st = cf_run(h.config, &lh.log);
  if (st == CF_ERR_SOLVER_ABORT) {
    const std::string dump = (std::filesystem::path(out_dir) / (stem + "_abort.txt")).string();
    if (FILE* f = std::fopen(dump.c_str(), "wb")) {
      std::fprintf(f, "%s\n%s", cf_last_error(), cf_last_diagnostic());
      std::fclose(f);
    }
    std::fprintf(stderr, "solver abort at tick %d: %s\ndiagnostic dump: %s\n", cf_last_abort_tick(), cf_last_error(),
                 dump.c_str());
    return kSolverAbort;
  }
  if (st != CF_OK) return report(st);

  const std::string log_path =
      log_path_flag.empty() ? (std::filesystem::path(out_dir) / (stem + ".json")).string() : log_path_flag;
  if (cf_status w = cf_log_write_json(lh.log, log_path.c_str()); w != CF_OK) return report(w);

  cf_summary summary;
  if (cf_status s = cf_log_summary(lh.log, &summary); s != CF_OK) return report(s);
  const std::string csv = (std::filesystem::path(out_dir) / (stem + "_summary.csv")).string();
  const char* status = "ok";
  if (cf_status s = cf_summary_csv_write(&summary, &status, 1, csv.c_str()); s != CF_OK) return report(s);

  double delay = 0.0;
  if (cf_log_average_delay(lh.log, &delay) == CF_ERR_NO_DATA) {
    std::fprintf(stderr, "warning: %s\n", cf_last_error());
  }
  print_summary(summary);
  std::printf("log: %s\nsummary: %s\n", log_path.c_str(), csv.c_str());
  return kOk;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void sweep_progress(void* user, size_t point, size_t done, size_t total) {
  const auto* sweep_axes = static_cast<const std::pair<std::vector<double>, std::vector<double>>*>(user);
  const size_t ns = sweep_axes->second.size();
  std::fprintf(stderr, "[%zu/%zu] R=%g s_dist=%g finished\n", done, total, sweep_axes->first[point / ns],
               sweep_axes->second[point % ns]);
}

int cmd_sweep(const ConfigFlags& flags, const std::vector<double>& radii, const std::vector<double>& s_dists,
              const std::string& out_dir, int workers) {
  Handle h;
  ConfigFlags base = flags;
  if (!radii.empty()) base.radius = fmt_double(*std::max_element(radii.begin(), radii.end()));
  if (!s_dists.empty()) base.s_dist = fmt_double(s_dists.front());
  if (cf_status st = build_config(base, &h.config); st != CF_OK) return report(st);
  std::pair<std::vector<double>, std::vector<double>> axes{radii, s_dists};
  cf_sweep* sweep = nullptr;
  const cf_status st = cf_sweep_run(h.config, radii.data(), radii.size(), s_dists.data(), s_dists.size(),
                                    out_dir.c_str(), workers, sweep_progress, &axes, &sweep);
  if (st != CF_OK) return report(st);

  std::printf("%s\n", cf_summary_csv_header());
  for (size_t i = 0; i < cf_sweep_point_count(sweep); ++i) {
    cf_summary s;
    cf_sweep_point(sweep, i, &s);
    char row[512];
    cf_summary_csv_row(&s, cf_sweep_point_text(sweep, i, "status"), row, sizeof row, nullptr);
    std::printf("%s\n", row);
    const char* diag = cf_sweep_point_text(sweep, i, "diagnostic_path");
    if (diag && *diag) std::fprintf(stderr, "point R=%g s_dist=%g failed: %s (dump: %s)\n", s.radius, s.s_dist,
                                    cf_sweep_point_text(sweep, i, "error"), diag);
  }
  std::printf("csv: %s\ncharts: %s %s\n", cf_sweep_path(sweep, "csv"), cf_sweep_path(sweep, "radius_chart"),
              cf_sweep_path(sweep, "sdist_chart"));
  const size_t failed = cf_sweep_failed_count(sweep);
  cf_sweep_destroy(sweep);
  return failed ? kSweepFailures : kOk;
}

int cmd_plot(const std::string& log_path, const std::string& lane, const std::string& out_flag) {
  if (lane != "north_south" && lane != "west_east") {
    std::fprintf(stderr, "error: unknown lane '%s' (expected north_south or west_east)\n", lane.c_str());
    return kUsage;
  }
  LogHandle lh;
  if (cf_status st = cf_log_read_json(log_path.c_str(), &lh.log); st != CF_OK) return report(st);
  const std::string out =
      out_flag.empty() ? std::filesystem::path(log_path).replace_extension().string() + "_" + lane + ".svg" : out_flag;
  if (cf_status st = cf_log_plot_spacetime(lh.log, lane.c_str(), out.c_str()); st != CF_OK) return report(st);
  std::printf("%s\n", out.c_str());
  return kOk;
}

int cmd_verify(const std::string& log_path) {
  LogHandle lh;
  if (cf_status st = cf_log_read_json(log_path.c_str(), &lh.log); st != CF_OK) return report(st);
  cf_report* rep = nullptr;
  if (cf_status st = cf_log_verify(lh.log, &rep); st != CF_OK) return report(st);
  const size_t n = cf_report_count(rep);
  for (size_t i = 0; i < n; ++i) std::printf("%s\n", cf_report_line(rep, i));
  cf_report_destroy(rep);
  cf_summary s;
  if (cf_log_summary(lh.log, &s) == CF_OK) {
    std::printf("min same-lane gap %g m, min cross separation %g m\n", s.min_gap, s.min_cross_sep);
  }
  std::printf("%zu violation%s\n", n, n == 1 ? "" : "s");
  return n ? kViolations : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centralized MILP intersection controller simulator"};
  app.set_version_flag("--version", cf_version());
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string run_out = ".", run_log;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run_flags.add_to(run, false);
  run->add_option("--out-dir", run_out, "output directory");
  run->add_option("--log", run_log, "trajectory log path (default: <out-dir>/run_R<R>_s<s>.json)");

  ConfigFlags sweep_flags;
  std::vector<double> radii{25, 40, 60, 90, 120, 150, 180}, s_dists{4};
  std::string sweep_out = "sweep";
  int workers = 1;
  auto* sweep = app.add_subcommand("sweep", "simulate a radius x s_dist grid with one seed");
  sweep_flags.add_to(sweep, true);
  sweep->add_option("--radius", radii, "radii [m], comma separated")->delimiter(',');
  sweep->add_option("--s-dist", s_dists, "s_dist values [m], comma separated")->delimiter(',');
  sweep->add_option("--out-dir", sweep_out, "output directory");
  sweep->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);

  std::string plot_log, plot_lane = "west_east", plot_out;
  auto* plot = app.add_subcommand("plot-spacetime", "space-time SVG of one lane");
  plot->add_option("log", plot_log, "trajectory log JSON")->required();
  plot->add_option("--lane", plot_lane, "north_south or west_east");
  plot->add_option("--out", plot_out, "SVG path (default: next to the log)");

  std::string verify_log;
  auto* verify = app.add_subcommand("verify", "audit a trajectory log for safety and dynamics violations");
  verify->add_option("log", verify_log, "trajectory log JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*run) return cmd_run(run_flags, run_out, run_log);
  if (*sweep) return cmd_sweep(sweep_flags, radii, s_dists, sweep_out, workers);
  if (*plot) return cmd_plot(plot_log, plot_lane, plot_out);
  if (*verify) return cmd_verify(verify_log);
  return kUsage;
}
