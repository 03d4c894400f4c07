#include "crossflow/crossflow.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "crossflow/config.hpp"
#include "crossflow/metrics.hpp"
#include "crossflow/plot.hpp"
#include "crossflow/simulation.hpp"
#include "crossflow/sweep.hpp"
#include "crossflow/trajectory_log.hpp"
#include "crossflow/verify.hpp"

struct cf_config {
  crossflow::SimConfig cfg;
};

struct cf_log {
  crossflow::TrajectoryLog log;
};

struct cf_report {
  std::vector<std::string> lines;
};

struct cf_sweep {
  crossflow::SweepResult result;
};

namespace {

struct LastError {
  std::string message;
  std::string key;
  std::string diagnostic;
  int abort_tick = -1;
};

thread_local LastError last_error;

cf_status fail(cf_status status, std::string message, std::string key = {}) {
  last_error = {std::move(message), std::move(key), {}, -1};
  return status;
}

// Maps exceptions escaping the C++ core onto status codes.
template <typename F>
cf_status guarded(F&& body) {
  try {
    return body();
  } catch (const crossflow::SimulationAbort& e) {
    last_error = {e.what(), {}, e.diagnostic(), e.tick()};
    return CF_ERR_SOLVER_ABORT;
  } catch (const crossflow::ConfigError& e) {
    return fail(CF_ERR_CONFIG, e.what(), e.key());
  } catch (const crossflow::NoDataError& e) {
    return fail(CF_ERR_NO_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CF_ERR_INTERNAL, "out of memory");
  } catch (const std::invalid_argument& e) {
    return fail(CF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CF_ERR_INTERNAL, e.what());
  }
}

cf_status copy_out(const std::string& text, char* buffer, std::size_t size, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buffer || size < text.size() + 1) {
    return fail(CF_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return CF_OK;
}

void to_c(const crossflow::RunSummary& s, cf_summary* out) {
  out->radius = s.radius;
  out->s_dist = s.s_dist;
  out->seed = s.seed;
  out->has_average_delay = s.average_delay.has_value();
  out->average_delay = s.average_delay.value_or(NAN);
  out->total_solver_time = s.total_solver_time;
  out->max_tick_solver_time = s.max_tick_solver_time;
  out->mean_tick_solver_time = s.mean_tick_solver_time;
  out->active_duration = s.active_duration;
  out->agents_spawned = s.agents_spawned;
  out->agents_completed = s.agents_completed;
  out->min_gap = s.min_gap;
  out->min_cross_sep = s.min_cross_sep;
}

crossflow::RunSummary from_c(const cf_summary& s, const char* status) {
  crossflow::RunSummary out;
  out.radius = s.radius;
  out.s_dist = s.s_dist;
  out.seed = s.seed;
  if (s.has_average_delay) out.average_delay = s.average_delay;
  out.total_solver_time = s.total_solver_time;
  out.max_tick_solver_time = s.max_tick_solver_time;
  out.mean_tick_solver_time = s.mean_tick_solver_time;
  out.active_duration = s.active_duration;
  out.agents_spawned = s.agents_spawned;
  out.agents_completed = s.agents_completed;
  out.min_gap = s.min_gap;
  out.min_cross_sep = s.min_cross_sep;
  out.status = status ? status : "ok";
  return out;
}

const std::vector<std::string>& key_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [key, value] : crossflow::config_entries(crossflow::SimConfig{})) out.push_back(key);
    return out;
  }();
  return names;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_name(cf_status status) {
  switch (status) {
    case CF_OK: return "ok";
    case CF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CF_ERR_CONFIG: return "configuration error";
    case CF_ERR_IO: return "i/o error";
    case CF_ERR_PARSE: return "parse error";
    case CF_ERR_SOLVER_ABORT: return "solver abort";
    case CF_ERR_NO_DATA: return "no data";
    case CF_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case CF_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* cf_last_error(void) { return last_error.message.c_str(); }
const char* cf_last_error_key(void) { return last_error.key.c_str(); }
const char* cf_last_diagnostic(void) { return last_error.diagnostic.c_str(); }
int cf_last_abort_tick(void) { return last_error.abort_tick; }

cf_status cf_config_create(cf_config** out) {
  if (!out) return fail(CF_ERR_INVALID_ARGUMENT, "null output handle");
  return guarded([&] {
    *out = new cf_config{};
    return CF_OK;
  });
}

cf_status cf_config_clone(const cf_config* config, cf_config** out) {
  if (!config || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] {
    *out = new cf_config{*config};
    return CF_OK;
  });
}

void cf_config_destroy(cf_config* config) { delete config; }

cf_status cf_config_set(cf_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    crossflow::set_config_value(config->cfg, key, value);
    return CF_OK;
  });
}

cf_status cf_config_get(const cf_config* config, const char* key, char* buffer, size_t size, size_t* needed) {
  if (!config || !key) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return copy_out(crossflow::get_config_value(config->cfg, key), buffer, size, needed); });
}

cf_status cf_config_load_file(cf_config* config, const char* path) {
  if (!config || !path) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  if (!std::filesystem::is_regular_file(path)) return fail(CF_ERR_IO, std::string("cannot open '") + path + "'");
  return guarded([&] {
    crossflow::load_config_file(config->cfg, path);
    return CF_OK;
  });
}

cf_status cf_config_validate(const cf_config* config) {
  if (!config) return fail(CF_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] {
    config->cfg.validate();
    return CF_OK;
  });
}

size_t cf_config_key_count(void) { return key_names().size(); }

const char* cf_config_key_name(size_t index) {
  return index < key_names().size() ? key_names()[index].c_str() : nullptr;
}

cf_status cf_run(const cf_config* config, cf_log** out) {
  if (!config || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null handle");
  return guarded([&] {
    auto* handle = new cf_log{crossflow::run_sim(config->cfg)};
    *out = handle;
    return CF_OK;
  });
}

cf_status cf_log_read_json(const char* path, cf_log** out) {
  if (!path || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  if (!std::filesystem::is_regular_file(path)) return fail(CF_ERR_IO, std::string("cannot open '") + path + "'");
  return guarded([&] {
    try {
      *out = new cf_log{crossflow::read_log_json_file(path)};
    } catch (const std::runtime_error& e) {
      return fail(CF_ERR_PARSE, e.what());
    }
    return CF_OK;
  });
}

cf_status cf_log_write_json(const cf_log* log, const char* path) {
  if (!log || !path) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      crossflow::write_log_json_file(log->log, path);
    } catch (const std::runtime_error& e) {
      return fail(CF_ERR_IO, e.what());
    }
    return CF_OK;
  });
}

void cf_log_destroy(cf_log* log) { delete log; }

cf_status cf_log_summary(const cf_log* log, cf_summary* out) {
  if (!log || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    to_c(crossflow::summarize(log->log), out);
    return CF_OK;
  });
}

cf_status cf_log_average_delay(const cf_log* log, double* out) {
  if (!log || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = crossflow::average_delay(log->log);
    return CF_OK;
  });
}

cf_status cf_log_platoons(const cf_log* log, double headway_threshold, cf_platoon_stats* out) {
  if (!log || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  if (!(headway_threshold >= 0.0)) return fail(CF_ERR_INVALID_ARGUMENT, "headway threshold must be non-negative");
  return guarded([&] {
    const auto stats = crossflow::platoon_stats(log->log, headway_threshold);
    out->platoons = stats.platoons;
    out->mean_size = stats.mean_size;
    out->mean_headway = stats.mean_headway;
    out->min_headway = stats.min_headway;
    out->largest = stats.size_histogram.empty() ? 0 : stats.size_histogram.rbegin()->first;
    return CF_OK;
  });
}

cf_status cf_log_plot_spacetime(const cf_log* log, const char* lane, const char* path) {
  if (!log || !lane || !path) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  const auto parsed = crossflow::parse_lane(lane);
  if (!parsed) return fail(CF_ERR_INVALID_ARGUMENT, std::string("unknown lane '") + lane + "'", "lane");
  return guarded([&] {
    try {
      crossflow::write_text_file(path, crossflow::spacetime_svg(log->log, *parsed));
    } catch (const std::runtime_error& e) {
      return fail(CF_ERR_IO, e.what());
    }
    return CF_OK;
  });
}

cf_status cf_log_verify(const cf_log* log, cf_report** out) {
  if (!log || !out) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto report = std::make_unique<cf_report>();
    for (const auto& v : crossflow::verify_log(log->log)) report->lines.push_back(v.describe());
    *out = report.release();
    return CF_OK;
  });
}

size_t cf_report_count(const cf_report* report) { return report ? report->lines.size() : 0; }

const char* cf_report_line(const cf_report* report, size_t index) {
  return report && index < report->lines.size() ? report->lines[index].c_str() : nullptr;
}

void cf_report_destroy(cf_report* report) { delete report; }

const char* cf_summary_csv_header(void) { return crossflow::summary_csv_header().c_str(); }

cf_status cf_summary_csv_row(const cf_summary* summary, const char* status, char* buffer, size_t size,
                             size_t* needed) {
  if (!summary) return fail(CF_ERR_INVALID_ARGUMENT, "null summary");
  return guarded([&] {
    return copy_out(crossflow::summary_csv_row(from_c(*summary, status)), buffer, size, needed);
  });
}

cf_status cf_summary_csv_write(const cf_summary* summaries, const char* const* statuses, size_t count,
                               const char* path) {
  if ((!summaries && count > 0) || !path) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<crossflow::RunSummary> rows;
    for (size_t i = 0; i < count; ++i) rows.push_back(from_c(summaries[i], statuses ? statuses[i] : nullptr));
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(CF_ERR_IO, std::string("cannot write '") + path + "'");
    crossflow::write_summary_csv(rows, out);
    return out ? CF_OK : fail(CF_ERR_IO, std::string("write to '") + path + "' failed");
  });
}

cf_status cf_sweep_run(const cf_config* base, const double* radii, size_t radius_count, const double* s_dists,
                       size_t s_dist_count, const char* out_dir, int workers, cf_sweep_progress progress, void* user,
                       cf_sweep** out) {
  if (!base || !out || (!radii && radius_count) || (!s_dists && s_dist_count)) {
    return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    crossflow::ExperimentSpec spec;
    spec.base = base->cfg;
    spec.radii.assign(radii, radii + radius_count);
    spec.s_dists.assign(s_dists, s_dists + s_dist_count);
    spec.out_dir = out_dir ? out_dir : ".";
    spec.workers = workers;
    crossflow::SweepProgress hook;
    if (progress) {
      hook = [&](std::size_t index, const crossflow::SweepPoint&, int done, int total) {
        progress(user, index, static_cast<size_t>(done), static_cast<size_t>(total));
      };
    }
    auto handle = std::make_unique<cf_sweep>();
    handle->result = crossflow::run_sweep(spec, hook);
    *out = handle.release();
    return CF_OK;
  });
}

size_t cf_sweep_point_count(const cf_sweep* sweep) { return sweep ? sweep->result.points.size() : 0; }

size_t cf_sweep_failed_count(const cf_sweep* sweep) {
  return sweep ? static_cast<size_t>(sweep->result.failed()) : 0;
}

cf_status cf_sweep_point(const cf_sweep* sweep, size_t index, cf_summary* summary) {
  if (!sweep || !summary) return fail(CF_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= sweep->result.points.size()) return fail(CF_ERR_INVALID_ARGUMENT, "point index out of range");
  to_c(sweep->result.points[index].summary, summary);
  return CF_OK;
}

const char* cf_sweep_point_text(const cf_sweep* sweep, size_t index, const char* field) {
  if (!sweep || !field || index >= sweep->result.points.size()) return nullptr;
  const auto& p = sweep->result.points[index];
  const std::string f = field;
  if (f == "status") return p.summary.status.c_str();
  if (f == "log_path") return p.log_path.c_str();
  if (f == "diagnostic_path") return p.diagnostic_path.c_str();
  if (f == "error") return p.error.c_str();
  return nullptr;
}

const char* cf_sweep_path(const cf_sweep* sweep, const char* which) {
  if (!sweep || !which) return nullptr;
  const std::string w = which;
  if (w == "csv") return sweep->result.csv_path.c_str();
  if (w == "radius_chart") return sweep->result.radius_chart_path.c_str();
  if (w == "sdist_chart") return sweep->result.sdist_chart_path.c_str();
  return nullptr;
}

void cf_sweep_destroy(cf_sweep* sweep) { delete sweep; }

}  // extern "C"
