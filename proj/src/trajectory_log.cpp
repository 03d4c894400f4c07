#include "crossflow/trajectory_log.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crossflow {

using Json = nlohmann::ordered_json;

void lane_to_world(Lane lane, double pos, double& x, double& y) {
  if (lane == Lane::west_east) {
    x = pos;
    y = 0.0;
  } else {
    x = 0.0;
    y = -pos;
  }
}

double world_to_lane(Lane lane, double x, double y) { return lane == Lane::west_east ? x : -y; }

namespace {

Json optional_tick(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<int> read_optional_tick(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

Json to_json(const TrajectoryLog& log) {
  Json root;
  Json config = Json::object();
  for (const auto& [key, value] : config_entries(log.config)) config[key] = Json::parse(value);
  root["config"] = std::move(config);

  Json ticks = Json::array();
  for (const auto& t : log.ticks) {
    Json j;
    j["tick"] = t.tick;
    j["t"] = t.t;
    j["solver_time"] = t.solver_time;
    j["node_count"] = t.node_count;
    j["in_region"] = t.in_region;
    ticks.push_back(std::move(j));
  }
  root["ticks"] = std::move(ticks);

  Json agents = Json::array();
  for (const auto& a : log.agents) {
    Json j;
    j["id"] = a.id;
    j["lane"] = to_string(a.lane);
    j["spawn_tick"] = a.spawn_tick;
    j["entry_tick"] = optional_tick(a.entry_tick);
    j["exit_tick"] = optional_tick(a.exit_tick);
    Json traj = Json::array();
    for (const auto& s : a.trajectory) {
      Json p;
      p["t"] = s.t;
      p["x"] = s.x;
      p["y"] = s.y;
      p["v"] = s.v;
      p["u"] = s.u;
      p["in_region"] = s.in_region;
      traj.push_back(std::move(p));
    }
    j["trajectory"] = std::move(traj);
    agents.push_back(std::move(j));
  }
  root["agents"] = std::move(agents);
  return root;
}

}  // namespace

void write_log_json(const TrajectoryLog& log, std::ostream& out) { out << to_json(log).dump() << '\n'; }

std::string log_to_json(const TrajectoryLog& log) {
  std::ostringstream out;
  write_log_json(log, out);
  return out.str();
}

TrajectoryLog read_log_json(std::istream& in) {
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("trajectory log is not valid JSON: ") + e.what());
  }
  TrajectoryLog log;
  try {
    for (const auto& [key, value] : root.at("config").items()) {
      set_config_value(log.config, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    for (const auto& j : root.at("ticks")) {
      TickLog t;
      t.tick = j.at("tick").get<int>();
      t.t = j.at("t").get<double>();
      t.solver_time = j.at("solver_time").get<double>();
      t.node_count = j.at("node_count").get<long>();
      t.in_region = j.at("in_region").get<int>();
      log.ticks.push_back(t);
    }
    for (const auto& j : root.at("agents")) {
      AgentLog a;
      a.id = j.at("id").get<int>();
      const auto lane = parse_lane(j.at("lane").get<std::string>());
      if (!lane) throw std::runtime_error("unknown lane '" + j.at("lane").get<std::string>() + "'");
      a.lane = *lane;
      a.spawn_tick = j.at("spawn_tick").get<int>();
      a.entry_tick = read_optional_tick(j.at("entry_tick"));
      a.exit_tick = read_optional_tick(j.at("exit_tick"));
      for (const auto& p : j.at("trajectory")) {
        LogSample s;
        s.t = p.at("t").get<double>();
        s.x = p.at("x").get<double>();
        s.y = p.at("y").get<double>();
        s.v = p.at("v").get<double>();
        s.u = p.at("u").get<double>();
        s.in_region = p.at("in_region").get<bool>();
        a.trajectory.push_back(s);
      }
      log.agents.push_back(std::move(a));
    }
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed trajectory log: ") + e.what());
  } catch (const ConfigError& e) {
    throw std::runtime_error(std::string("malformed trajectory log config: ") + e.what());
  }
  return log;
}

TrajectoryLog read_log_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_log_json(in);
}

void write_log_json_file(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_log_json(log, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace crossflow
