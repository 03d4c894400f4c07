#ifndef CROSSFLOW_CROSSFLOW_H
#define CROSSFLOW_CROSSFLOW_H

/*
 * C interface to the crossflow intersection simulator.
 *
 * Every function returning cf_status reports failures through the code and a
 * thread-local message readable with cf_last_error(). Handles are opaque and
 * owned by the caller; release them with the matching *_destroy function.
 * Strings returned as const char* stay valid until the owning handle is
 * destroyed, or for cf_last_* until the next failing call on the same thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CF_API __declspec(dllexport)
#else
#  define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1, /* null handle or bad argument */
  CF_ERR_CONFIG = 2,           /* invalid configuration; see cf_last_error_key */
  CF_ERR_IO = 3,               /* file could not be read or written */
  CF_ERR_PARSE = 4,            /* malformed log or CSV */
  CF_ERR_SOLVER_ABORT = 5,     /* a scene could not be solved; see cf_last_diagnostic */
  CF_ERR_NO_DATA = 6,          /* metric undefined, e.g. no completed agent */
  CF_ERR_BUFFER_TOO_SMALL = 7, /* output buffer too small; required size reported */
  CF_ERR_INTERNAL = 8
} cf_status;

typedef struct cf_config cf_config;
typedef struct cf_log cf_log;
typedef struct cf_report cf_report;
typedef struct cf_sweep cf_sweep;

typedef struct cf_summary {
  double radius;
  double s_dist;
  uint64_t seed;
  int has_average_delay;
  double average_delay;
  double total_solver_time;
  double max_tick_solver_time;
  double mean_tick_solver_time;
  double active_duration;
  int agents_spawned;
  int agents_completed;
  double min_gap;       /* +inf without any same-lane pair */
  double min_cross_sep; /* +inf without any active cross pair */
} cf_summary;

typedef struct cf_platoon_stats {
  int platoons;
  double mean_size;
  double mean_headway;
  double min_headway; /* +inf without any intra-platoon headway */
  int largest;
} cf_platoon_stats;

CF_API const char* cf_version(void);
CF_API const char* cf_status_name(cf_status status);

/* Thread-local details of the most recent failure. */
CF_API const char* cf_last_error(void);
CF_API const char* cf_last_error_key(void);  /* offending config key, or "" */
CF_API const char* cf_last_diagnostic(void); /* abort dump, or "" */
CF_API int cf_last_abort_tick(void);         /* -1 when the last failure was not an abort */

/* Configuration: scenario defaults, addressed by snake_case keys. */
CF_API cf_status cf_config_create(cf_config** out);
CF_API cf_status cf_config_clone(const cf_config* config, cf_config** out);
CF_API void cf_config_destroy(cf_config* config);
CF_API cf_status cf_config_set(cf_config* config, const char* key, const char* value);
/* Writes the value with a terminating NUL. On CF_ERR_BUFFER_TOO_SMALL,
 * *needed (if non-null) holds the required size including the NUL. */
CF_API cf_status cf_config_get(const cf_config* config, const char* key, char* buffer, size_t size, size_t* needed);
CF_API cf_status cf_config_load_file(cf_config* config, const char* path);
CF_API cf_status cf_config_validate(const cf_config* config);
CF_API size_t cf_config_key_count(void);
CF_API const char* cf_config_key_name(size_t index); /* null when out of range */

/* Simulation. */
CF_API cf_status cf_run(const cf_config* config, cf_log** out);

/* Trajectory logs. */
CF_API cf_status cf_log_read_json(const char* path, cf_log** out);
CF_API cf_status cf_log_write_json(const cf_log* log, const char* path);
CF_API void cf_log_destroy(cf_log* log);
CF_API cf_status cf_log_summary(const cf_log* log, cf_summary* out);
CF_API cf_status cf_log_average_delay(const cf_log* log, double* out);
CF_API cf_status cf_log_platoons(const cf_log* log, double headway_threshold, cf_platoon_stats* out);
/* lane is "north_south" or "west_east". */
CF_API cf_status cf_log_plot_spacetime(const cf_log* log, const char* lane, const char* path);

/* Post-hoc verification; an empty report means the log is clean. */
CF_API cf_status cf_log_verify(const cf_log* log, cf_report** out);
CF_API size_t cf_report_count(const cf_report* report);
CF_API const char* cf_report_line(const cf_report* report, size_t index);
CF_API void cf_report_destroy(cf_report* report);

/* Summary CSV. status is "ok" unless the run failed. */
CF_API const char* cf_summary_csv_header(void);
CF_API cf_status cf_summary_csv_row(const cf_summary* summary, const char* status, char* buffer, size_t size,
                                    size_t* needed);
CF_API cf_status cf_summary_csv_write(const cf_summary* summaries, const char* const* statuses, size_t count,
                                      const char* path);

/* Sweeps over radius x s_dist with a shared seed. The callback, if any, runs
 * once per finished point (serialized) with the point index in grid order. */
typedef void (*cf_sweep_progress)(void* user, size_t point, size_t done, size_t total);
CF_API cf_status cf_sweep_run(const cf_config* base, const double* radii, size_t radius_count, const double* s_dists,
                              size_t s_dist_count, const char* out_dir, int workers, cf_sweep_progress progress,
                              void* user, cf_sweep** out);
CF_API size_t cf_sweep_point_count(const cf_sweep* sweep);
CF_API size_t cf_sweep_failed_count(const cf_sweep* sweep);
CF_API cf_status cf_sweep_point(const cf_sweep* sweep, size_t index, cf_summary* summary);
/* Per-point strings: "status", "log_path", "diagnostic_path", "error". */
CF_API const char* cf_sweep_point_text(const cf_sweep* sweep, size_t index, const char* field);
/* Sweep-level paths: "csv", "radius_chart", "sdist_chart". */
CF_API const char* cf_sweep_path(const cf_sweep* sweep, const char* which);
CF_API void cf_sweep_destroy(cf_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif /* CROSSFLOW_CROSSFLOW_H */
