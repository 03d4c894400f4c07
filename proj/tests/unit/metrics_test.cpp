#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "crossflow/metrics.hpp"
#include "crossflow/simulation.hpp"
#include "crossflow/verify.hpp"

using namespace crossflow;

namespace {

// Agent moving at constant speed from `pos0`, sampled every tick. The region
// flag follows the optional entry and exit ticks.
AgentLog straight_agent(int id, Lane lane, int spawn_tick, double pos0, double v, int samples,
                        std::optional<int> entry, std::optional<int> exit, double dt) {
  AgentLog a;
  a.id = id;
  a.lane = lane;
  a.spawn_tick = spawn_tick;
  a.entry_tick = entry;
  a.exit_tick = exit;
  for (int k = 0; k < samples; ++k) {
    const int tick = spawn_tick + k;
    LogSample s;
    s.t = tick * dt;
    lane_to_world(lane, pos0 + v * dt * k, s.x, s.y);
    s.v = v;
    s.in_region = entry && tick >= *entry && (!exit || tick < *exit);
    a.trajectory.push_back(s);
  }
  return a;
}

TrajectoryLog small_log() {
  TrajectoryLog log;
  log.config.radius = 120.0;
  log.config.lane_start = -200.0;
  return log;
}

SimConfig quick_config() {
  SimConfig cfg;
  cfg.radius = 25.0;
  cfg.lane_start = -40.0;
  cfg.lane_end = 40.0;
  cfg.horizon = 30;
  cfg.duration = 5.0;
  return cfg;
}

}  // namespace

TEST_CASE("delay is actual minus ideal crossing time") {
  SimConfig cfg;
  cfg.radius = 120.0;
  AgentLog a;
  a.id = 3;
  a.entry_tick = 100;
  a.exit_tick = 280;
  const auto d = compute_delay(a, cfg);
  REQUIRE(d);
  CHECK(d->agent_id == 3);
  CHECK(d->ideal_time == doctest::Approx(16.0));
  CHECK(d->actual_time == doctest::Approx(18.0));
  CHECK(d->delay == doctest::Approx(2.0));

  a.exit_tick.reset();
  CHECK_FALSE(compute_delay(a, cfg));
}

TEST_CASE("average delay covers completed agents only") {
  TrajectoryLog log = small_log();
  AgentLog a, b, c;
  a.id = 0;
  a.entry_tick = 0;
  a.exit_tick = 170;  // 17 s, one second late
  b.id = 1;
  b.entry_tick = 10;
  b.exit_tick = 200;  // 19 s, three seconds late
  c.id = 2;
  c.entry_tick = 20;  // still inside
  log.agents = {a, b, c};
  CHECK(average_delay(log) == doctest::Approx(2.0));

  const auto delays = compute_delays(log);
  REQUIRE(delays.size() == 2);
  CHECK(std::abs(average_delay(log) - (delays[0].delay + delays[1].delay) / 2.0) < 1e-12);

  const RunSummary s = summarize(log);
  REQUIRE(s.average_delay);
  CHECK(*s.average_delay == doctest::Approx(2.0));
  CHECK(s.agents_spawned == 3);
  CHECK(s.agents_completed == 2);
}

TEST_CASE("average delay without completed agents is a no-data error") {
  TrajectoryLog log = small_log();
  CHECK_THROWS_AS(average_delay(log), NoDataError);
  AgentLog a;
  a.entry_tick = 5;
  log.agents.push_back(a);
  CHECK_THROWS_AS(average_delay(log), NoDataError);
  CHECK_FALSE(summarize(log).average_delay);
}

TEST_CASE("separation minima of a lone agent are infinite") {
  TrajectoryLog log = small_log();
  log.agents.push_back(straight_agent(0, Lane::west_east, 0, -200.0, 15.0, 50, std::nullopt, std::nullopt, 0.1));
  const auto m = separation_minima(log);
  CHECK(std::isinf(m.min_gap));
  CHECK(std::isinf(m.min_cross_sep));
}

TEST_CASE("separation minima match hand arithmetic") {
  TrajectoryLog log = small_log();
  // Same lane: 5 m apart at equal speed. Cross: closest approach when both
  // sit 2 m before the center at tick 10.
  log.agents.push_back(straight_agent(0, Lane::west_east, 0, -20.0, 10.0, 11, std::nullopt, std::nullopt, 0.1));
  log.agents.push_back(straight_agent(1, Lane::west_east, 0, -25.0, 10.0, 11, std::nullopt, std::nullopt, 0.1));
  log.agents.push_back(straight_agent(2, Lane::north_south, 0, -17.0, 15.0 / 1.0, 1, std::nullopt, std::nullopt, 0.1));
  const auto m = separation_minima(log);
  CHECK(m.min_gap == doctest::Approx(5.0));
  // At tick 0 the closest west-east agent is 20 m out and the north-south one 17 m.
  CHECK(m.min_cross_sep == doctest::Approx(37.0));
}

TEST_CASE("cleared agents drop out of the cross separation") {
  TrajectoryLog log = small_log();
  log.agents.push_back(straight_agent(0, Lane::west_east, 0, log.config.s_dist, 0.0, 3, std::nullopt, std::nullopt, 0.1));
  log.agents.push_back(straight_agent(1, Lane::north_south, 0, 0.0, 0.0, 3, std::nullopt, std::nullopt, 0.1));
  CHECK(std::isinf(separation_minima(log).min_cross_sep));
}

TEST_CASE("crossing time interpolates between samples") {
  const AgentLog a = straight_agent(0, Lane::north_south, 10, -1.5, 10.0, 5, std::nullopt, std::nullopt, 0.1);
  const auto t = center_crossing_time(a);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(1.15));
  const AgentLog b = straight_agent(1, Lane::north_south, 0, -50.0, 10.0, 5, std::nullopt, std::nullopt, 0.1);
  CHECK_FALSE(center_crossing_time(b));
}

TEST_CASE("platoons group crossings by headway") {
  TrajectoryLog log = small_log();
  // Crossing times 1.0, 1.3, 1.6 on one lane, then 3.0; 2.0 on the other.
  const double times[] = {1.0, 1.3, 1.6, 3.0};
  int id = 0;
  for (double tc : times) {
    log.agents.push_back(straight_agent(id++, Lane::west_east, 0, -10.0 * tc, 10.0, 40, std::nullopt, std::nullopt, 0.1));
  }
  log.agents.push_back(straight_agent(id++, Lane::north_south, 0, -20.0, 10.0, 40, std::nullopt, std::nullopt, 0.1));

  const PlatoonStats p = platoon_stats(log, 0.4);
  CHECK(p.platoons == 3);
  CHECK(p.size_histogram.at(3) == 1);
  CHECK(p.size_histogram.at(1) == 2);
  CHECK(p.mean_size == doctest::Approx(5.0 / 3.0));
  CHECK(p.mean_headway == doctest::Approx(0.3));
  CHECK(p.min_headway == doctest::Approx(0.3));

  const PlatoonStats single = platoon_stats(log, 0.0);
  CHECK(single.platoons == 5);
  CHECK(single.mean_size == doctest::Approx(1.0));
  CHECK(std::isinf(single.min_headway));
}

TEST_CASE("summary CSV rows round-trip") {
  RunSummary s;
  s.radius = 90.0;
  s.s_dist = 7.0;
  s.seed = 20;
  s.average_delay = 0.123456789012345;
  s.total_solver_time = 12.5;
  s.agents_spawned = 125;
  s.agents_completed = 92;
  s.min_gap = 3.0000001;
  s.min_cross_sep = std::numeric_limits<double>::infinity();
  const RunSummary back = parse_summary_csv_row(summary_csv_row(s));
  CHECK(back.radius == s.radius);
  CHECK(back.s_dist == s.s_dist);
  CHECK(back.seed == s.seed);
  REQUIRE(back.average_delay);
  CHECK(*back.average_delay == *s.average_delay);
  CHECK(back.total_solver_time == s.total_solver_time);
  CHECK(back.agents_spawned == s.agents_spawned);
  CHECK(back.agents_completed == s.agents_completed);
  CHECK(back.min_gap == s.min_gap);
  CHECK(std::isinf(back.min_cross_sep));
  CHECK(back.status == "ok");

  s.average_delay.reset();
  s.status = "aborted";
  const RunSummary failed = parse_summary_csv_row(summary_csv_row(s));
  CHECK_FALSE(failed.average_delay);
  CHECK(failed.status == "aborted");

  std::ostringstream out;
  write_summary_csv({s, s}, out);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == summary_csv_header());
  CHECK_THROWS(parse_summary_csv_row("1,2,3"));
}

TEST_CASE("verification flags injected faults") {
  SimConfig cfg = quick_config();
  const TrajectoryLog clean = run_sim(cfg);
  REQUIRE(verify_log(clean).empty());

  auto has = [](const std::vector<LogViolation>& v, ViolationKind kind) {
    for (const auto& x : v) {
      if (x.kind == kind) return true;
    }
    return false;
  };

  SUBCASE("speed above the limit") {
    TrajectoryLog log = clean;
    log.agents[0].trajectory[2].v = cfg.v_max + 0.5;
    CHECK(has(verify_log(log), ViolationKind::velocity_bound));
  }
  SUBCASE("teleport outside the region") {
    TrajectoryLog log = clean;
    // Shift along both axes so the lane coordinate moves on either lane.
    log.agents[0].trajectory[1].x += 0.25;
    log.agents[0].trajectory[1].y -= 0.25;
    CHECK(has(verify_log(log), ViolationKind::kinematics));
  }
  SUBCASE("control that does not match the motion") {
    TrajectoryLog log = clean;
    bool changed = false;
    for (auto& a : log.agents) {
      for (std::size_t k = 0; k + 1 < a.trajectory.size() && !changed; ++k) {
        if (a.trajectory[k].in_region) {
          a.trajectory[k].u += 1.0;
          changed = true;
        }
      }
    }
    REQUIRE(changed);
    CHECK(has(verify_log(log), ViolationKind::dynamics));
  }
  SUBCASE("followers closing in") {
    TrajectoryLog log;
    log.config = cfg;
    log.agents.push_back(straight_agent(0, Lane::west_east, 0, -35.0, 15.0, 3, std::nullopt, std::nullopt, cfg.dt));
    log.agents.push_back(straight_agent(1, Lane::west_east, 0, -37.0, 15.0, 3, std::nullopt, std::nullopt, cfg.dt));
    CHECK(has(verify_log(log), ViolationKind::same_lane_gap));
  }
  SUBCASE("both lanes inside the conflict zone") {
    TrajectoryLog log;
    log.config = cfg;
    log.agents.push_back(straight_agent(0, Lane::west_east, 0, -1.0, 0.0, 2, 0, std::nullopt, cfg.dt));
    log.agents.push_back(straight_agent(1, Lane::north_south, 0, -2.0, 0.0, 2, 0, std::nullopt, cfg.dt));
    CHECK(has(verify_log(log), ViolationKind::cross_separation));
  }
  SUBCASE("region flag out of step with the entry tick") {
    TrajectoryLog log = clean;
    log.agents[0].trajectory[0].in_region = !log.agents[0].trajectory[0].in_region;
    CHECK(has(verify_log(log), ViolationKind::phase));
  }
  SUBCASE("timestamps going backwards") {
    TrajectoryLog log = clean;
    log.agents[0].trajectory[1].t = log.agents[0].trajectory[0].t;
    CHECK(has(verify_log(log), ViolationKind::timestamp));
  }
}
