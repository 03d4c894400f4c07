#include "crossflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

namespace crossflow {

const char* to_string(Lane lane) { return lane == Lane::north_south ? "north_south" : "west_east"; }

std::optional<Lane> parse_lane(const std::string& text) {
  if (text == "north_south" || text == "ns") return Lane::north_south;
  if (text == "west_east" || text == "we") return Lane::west_east;
  return std::nullopt;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int SimConfig::total_ticks() const { return static_cast<int>(std::llround(duration / dt)); }

double SimConfig::position_bound() const {
  return std::max(2.0 * radius, radius + horizon * dt * v_max) + position_margin;
}

void SimConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive and finite");
  };
  auto nonneg = [](double v, const char* key) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be non-negative and finite");
  };
  positive(v_max, "v_max");
  positive(d_safe, "d_safe");
  positive(s_dist, "s_dist");
  positive(dt, "dt");
  positive(radius, "radius");
  positive(duration, "duration");
  positive(target_factor, "target_factor");
  nonneg(position_margin, "position_margin");
  nonneg(headway_threshold, "headway_threshold");
  if (random_step < 1) throw ConfigError("random_step", "must be at least 1");
  if (horizon < 2) throw ConfigError("horizon", "must be at least 2");
  if (!(lane_start < 0.0 && lane_end > 0.0)) throw ConfigError("lane_start", "lanes must run from negative to positive");
  if (!(radius < -lane_start && radius < lane_end)) throw ConfigError("radius", "must be smaller than the lane extent");
  if (!(u_min <= 0.0)) throw ConfigError("u_min", "must be non-positive");
  if (!(u_max >= 0.0)) throw ConfigError("u_max", "must be non-negative");
  if (u_min > u_max) throw ConfigError("u_min", "exceeds u_max");
  for (double w : weights.qo) nonneg(w, "qo");
  for (double w : weights.po) nonneg(w, "po");
  nonneg(weights.lambda_v, "lambda_v");
  if (!(weights.big_M > 2.0 * position_bound())) {
    throw ConfigError("big_m", "must exceed the position span " + format_double(2.0 * position_bound()));
  }
  if (!(relative_gap >= 0.0)) throw ConfigError("relative_gap", "must be non-negative");
  positive(solve_time_limit, "solve_time_limit");
  if (max_nodes < 1) throw ConfigError("max_nodes", "must be at least 1");
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

struct Field {
  const char* key;
  std::function<void(SimConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

Field real(const char* key, double SimConfig::*member) {
  return {key, [member](SimConfig& c, const std::string& k, const std::string& v) { c.*member = parse_double(k, v); },
          [member](const SimConfig& c) { return format_double(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      real("v_max", &SimConfig::v_max),
      real("d_safe", &SimConfig::d_safe),
      real("s_dist", &SimConfig::s_dist),
      real("dt", &SimConfig::dt),
      {"random_step", [](SimConfig& c, const std::string& k, const std::string& v) { c.random_step = static_cast<int>(parse_long(k, v)); },
       [](const SimConfig& c) { return std::to_string(c.random_step); }},
      {"horizon", [](SimConfig& c, const std::string& k, const std::string& v) { c.horizon = static_cast<int>(parse_long(k, v)); },
       [](const SimConfig& c) { return std::to_string(c.horizon); }},
      real("radius", &SimConfig::radius),
      real("duration", &SimConfig::duration),
      {"seed",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         const long s = parse_long(k, v);
         if (s < 0) throw ConfigError(k, "must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       },
       [](const SimConfig& c) { return std::to_string(c.seed); }},
      real("lane_start", &SimConfig::lane_start),
      real("lane_end", &SimConfig::lane_end),
      real("u_min", &SimConfig::u_min),
      real("u_max", &SimConfig::u_max),
      real("position_margin", &SimConfig::position_margin),
      real("target_factor", &SimConfig::target_factor),
      {"qo_pos", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.qo[0] = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.qo[0]); }},
      {"qo_vel", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.qo[1] = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.qo[1]); }},
      {"po_pos", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.po[0] = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.po[0]); }},
      {"po_vel", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.po[1] = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.po[1]); }},
      {"lambda_v", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.lambda_v = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.lambda_v); }},
      {"big_m", [](SimConfig& c, const std::string& k, const std::string& v) { c.weights.big_M = parse_double(k, v); },
       [](const SimConfig& c) { return format_double(c.weights.big_M); }},
      {"fixed_crossing_order",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.fixed_crossing_order = parse_bool(k, v); },
       [](const SimConfig& c) { return std::string(c.fixed_crossing_order ? "true" : "false"); }},
      {"lazy_pairs", [](SimConfig& c, const std::string& k, const std::string& v) { c.lazy_pairs = parse_bool(k, v); },
       [](const SimConfig& c) { return std::string(c.lazy_pairs ? "true" : "false"); }},
      real("headway_threshold", &SimConfig::headway_threshold),
      real("relative_gap", &SimConfig::relative_gap),
      real("solve_time_limit", &SimConfig::solve_time_limit),
      {"max_nodes", [](SimConfig& c, const std::string& k, const std::string& v) { c.max_nodes = parse_long(k, v); },
       [](const SimConfig& c) { return std::to_string(c.max_nodes); }},
  };
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.key) return f;
  }
  throw ConfigError(key, "unknown configuration key");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
  find_field(key).set(cfg, key, trim(value));
}

std::string get_config_value(const SimConfig& cfg, const std::string& key) { return find_field(key).get(cfg); }

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void load_config_file(SimConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set_config_value(cfg, trim(body.substr(0, eq)), body.substr(eq + 1));
  }
}

}  // namespace crossflow
