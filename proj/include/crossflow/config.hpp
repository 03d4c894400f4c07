#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crossflow {

enum class Lane { north_south, west_east };

const char* to_string(Lane lane);
std::optional<Lane> parse_lane(const std::string& text);

struct ModelWeights {
  std::array<double, 2> qo{0.001, 0.01};  // per-step deviation weight (pos, vel)
  std::array<double, 2> po{0.01, 0.1};    // terminal deviation weight (pos, vel)
  double lambda_v = 1.0;
  double big_M = 1000.0;  // m
};

struct SimConfig {
  double v_max = 15.0;   // m/s
  double d_safe = 3.0;   // m
  double s_dist = 4.0;   // m
  double dt = 0.1;       // s
  int random_step = 3;   // L
  int horizon = 60;      // N
  double radius = 120.0; // m
  double duration = 150.0;  // s
  std::uint64_t seed = 20;
  double lane_start = -200.0;  // lane frame, m
  double lane_end = 200.0;
  double u_min = -6.0;  // m/s^2
  double u_max = 3.0;
  double position_margin = 50.0;  // m beyond 2R on each side
  double target_factor = 1.2;     // terminal target = target_factor * 2R
  ModelWeights weights;
  bool fixed_crossing_order = false;
  double headway_threshold = 0.4;  // s

  // Pairs enter the scene model only once a plan violates them; false puts
  // every candidate pair in from the start.
  bool lazy_pairs = true;

  // Branch and bound settings for every scene solve.
  double relative_gap = 1e-4;
  double solve_time_limit = 120.0;  // s per component solve
  long max_nodes = 200000;

  int total_ticks() const;
  double terminal_position() const { return target_factor * 2.0 * radius; }
  // Half-width of the position box; wide enough to hold every reachable
  // position over one horizon.
  double position_bound() const;

  // Throws ConfigError naming the first offending key.
  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Keys use the snake_case field names above; weights are qo_pos, qo_vel,
// po_pos, po_vel, lambda_v, big_m. Throws ConfigError for unknown keys or
// unparsable values.
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_value(const SimConfig& cfg, const std::string& key);

// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg);

// Flat key=value file. Blank lines and lines starting with '#' are skipped.
void load_config_file(SimConfig& cfg, const std::string& path);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace crossflow
