#include "crossflow/intersection_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crossflow {

using milp::Sense;
using milp::Term;

bool cross_pair_active(const StateVector& a, const StateVector& b, double s_dist) {
  return a.pos < s_dist && b.pos < s_dist;
}

PairSelection default_pairs(const SceneSnapshot& scene, const SimConfig& cfg) {
  PairSelection out;
  for (Lane lane : {Lane::west_east, Lane::north_south}) {
    std::vector<int> members;
    for (int k = 0; k < static_cast<int>(scene.agents.size()); ++k) {
      if (scene.agents[k].lane == lane) members.push_back(k);
    }
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      return scene.agents[a].entry_ordinal < scene.agents[b].entry_ordinal;
    });
    for (std::size_t k = 1; k < members.size(); ++k) out.same_lane.emplace_back(members[k - 1], members[k]);
  }
  for (int p = 0; p < static_cast<int>(scene.agents.size()); ++p) {
    if (scene.agents[p].lane != Lane::west_east) continue;
    for (int q = 0; q < static_cast<int>(scene.agents.size()); ++q) {
      if (scene.agents[q].lane != Lane::north_south) continue;
      if (cross_pair_active(scene.agents[p].state, scene.agents[q].state, cfg.s_dist)) out.cross.emplace_back(p, q);
    }
  }
  return out;
}

int IndexMap::sign_binary(int agent, int step) const {
  const int b = sign_base_[agent];
  return b < 0 ? -1 : b + step - 1;
}

int IndexMap::index(int agent, VarKind kind, int step, int component) const {
  switch (kind) {
    case VarKind::state: return state(agent, step, component);
    case VarKind::control: return control(agent, step);
    case VarKind::slack: return slack(agent, step, component);
  }
  return -1;
}

std::pair<std::vector<double>, std::vector<double>> reachable_positions(const StateVector& s0, const SimConfig& cfg) {
  const int n = cfg.horizon;
  const double dt = cfg.dt;
  std::vector<double> lo(n + 1), hi(n + 1);
  StateVector fast = s0, slow = s0;
  lo[0] = hi[0] = s0.pos;
  for (int i = 1; i <= n; ++i) {
    const double ua = std::clamp((cfg.v_max - fast.vel) / dt, cfg.u_min, cfg.u_max);
    fast = {fast.pos + fast.vel * dt + 0.5 * ua * dt * dt, fast.vel + ua * dt};
    const double ub = std::clamp(-slow.vel / dt, cfg.u_min, cfg.u_max);
    slow = {slow.pos + slow.vel * dt + 0.5 * ub * dt * dt, slow.vel + ub * dt};
    hi[i] = fast.pos;
    lo[i] = slow.pos;
  }
  return {std::move(lo), std::move(hi)};
}

struct ModelBuilder {
  const SceneSnapshot& scene;
  const SimConfig& cfg;
  const BuildOptions& opts;
  BuiltModel out;
  std::vector<std::vector<double>> reach_lo, reach_hi;

  std::string label(const char* kind, int agent, int step, int component = -1) const {
    if (!opts.name_variables) return {};
    std::string s = std::string(kind) + "_a" + std::to_string(scene.agents[agent].id) + "_" + std::to_string(step);
    if (component == 0) s += "_pos";
    if (component == 1) s += "_vel";
    return s;
  }

  void add_agent_variables() {
    const int n = cfg.horizon;
    const double bound = cfg.position_bound();
    auto& p = out.problem;
    for (int a = 0; a < static_cast<int>(scene.agents.size()); ++a) {
      out.map.base_.push_back(p.num_variables());
      for (int i = 1; i <= n; ++i) {
        p.add_continuous(-bound, bound, label("s", a, i, 0));
        p.add_continuous(0.0, cfg.v_max, label("s", a, i, 1));
      }
      for (int i = 0; i < n; ++i) p.add_continuous(cfg.u_min, cfg.u_max, label("u", a, i));
      for (int i = 1; i <= n; ++i) {
        p.add_continuous(0.0, milp::kInf, label("w", a, i, 0));
        p.add_continuous(0.0, milp::kInf, label("w", a, i, 1));
      }
    }
  }

  void add_dynamics_constraints() {
    const auto mats = discretize_double_integrator(cfg.dt);
    const int n = cfg.horizon;
    const auto& map = out.map;
    for (int a = 0; a < static_cast<int>(scene.agents.size()); ++a) {
      const StateVector s0 = scene.agents[a].state;
      for (int i = 0; i < n; ++i) {
        std::vector<Term> pos{{map.state(a, i + 1, 0), 1.0}, {map.control(a, i), -mats.b[0]}};
        std::vector<Term> vel{{map.state(a, i + 1, 1), 1.0}, {map.control(a, i), -mats.b[1]}};
        double pos_rhs = 0.0, vel_rhs = 0.0;
        if (i == 0) {
          pos_rhs = mats.a[0][0] * s0.pos + mats.a[0][1] * s0.vel;
          vel_rhs = mats.a[1][0] * s0.pos + mats.a[1][1] * s0.vel;
        } else {
          pos.push_back({map.state(a, i, 0), -mats.a[0][0]});
          pos.push_back({map.state(a, i, 1), -mats.a[0][1]});
          vel.push_back({map.state(a, i, 1), -mats.a[1][1]});
        }
        out.problem.add_constraint(std::move(pos), Sense::equal, pos_rhs);
        out.problem.add_constraint(std::move(vel), Sense::equal, vel_rhs);
      }
    }
  }

  void add_deviation_constraints() {
    const int n = cfg.horizon;
    const double target[2] = {cfg.terminal_position(), cfg.v_max};
    const auto& map = out.map;
    for (int a = 0; a < static_cast<int>(scene.agents.size()); ++a) {
      for (int i = 1; i <= n; ++i) {
        for (int c = 0; c < 2; ++c) {
          const int s = map.state(a, i, c);
          const int w = map.slack(a, i, c);
          // w >= s - target is implied by w >= 0 when the state cannot pass the target.
          const double state_max = c == 0 ? reach_hi[a][i] : cfg.v_max;
          if (state_max > target[c]) {
            out.problem.add_constraint({{s, 1.0}, {w, -1.0}}, Sense::less_equal, target[c]);
          }
          out.problem.add_constraint({{s, 1.0}, {w, 1.0}}, Sense::greater_equal, target[c]);
        }
      }
    }
  }

  void add_same_lane_separation() {
    const auto& map = out.map;
    for (const auto& [lead, follow] : out.pairs.same_lane) {
      for (int i = 1; i <= cfg.horizon; ++i) {
        if (reach_lo[lead][i] - reach_hi[follow][i] >= cfg.d_safe) continue;
        out.problem.add_constraint({{map.state(lead, i, 0), 1.0}, {map.state(follow, i, 0), -1.0}},
                                   Sense::greater_equal, cfg.d_safe);
      }
    }
  }

  static double min_abs(double lo, double hi) {
    if (lo <= 0.0 && hi >= 0.0) return 0.0;
    return std::min(std::abs(lo), std::abs(hi));
  }

  // Creates N sign binaries for an agent, fixing those whose sign is implied
  // by reachability, with linking and monotonicity rows.
  void ensure_sign_binaries(int a) {
    if (out.map.sign_base_[a] >= 0) return;
    auto& p = out.problem;
    const int n = cfg.horizon;
    out.map.sign_base_[a] = p.num_variables();
    for (int i = 1; i <= n; ++i) {
      const int z = p.add_binary(label("z", a, i));
      const double lo = reach_lo[a][i], hi = reach_hi[a][i];
      if (lo >= 0.0) {
        p.set_bounds(z, 1.0, 1.0);
      } else if (hi <= 0.0) {
        p.set_bounds(z, 0.0, 0.0);
      } else {
        const int pos = out.map.state(a, i, 0);
        p.add_constraint({{pos, 1.0}, {z, -hi}}, Sense::less_equal, 0.0);
        p.add_constraint({{pos, 1.0}, {z, lo}}, Sense::greater_equal, lo);
      }
    }
    for (int i = 1; i < n; ++i) {
      const int z0 = out.map.sign_binary(a, i), z1 = out.map.sign_binary(a, i + 1);
      if (p.variables()[z0].lower == p.variables()[z0].upper) continue;
      if (p.variables()[z1].lower == p.variables()[z1].upper) continue;
      p.add_constraint({{z0, 1.0}, {z1, -1.0}}, Sense::less_equal, 0.0);
    }
  }

  // |a| + |b| >= s_dist as four half-plane rows, one selected by the sign
  // binaries and the other three relaxed by big-M.
  void add_intersection_separation_per_step() {
    auto& p = out.problem;
    const auto& map = out.map;
    const double s = cfg.s_dist;
    for (const auto& [we, ns] : out.pairs.cross) {
      std::vector<int> steps;
      for (int i = 1; i <= cfg.horizon; ++i) {
        if (min_abs(reach_lo[we][i], reach_hi[we][i]) + min_abs(reach_lo[ns][i], reach_hi[ns][i]) >= s) continue;
        steps.push_back(i);
      }
      if (steps.empty()) continue;
      ensure_sign_binaries(we);
      ensure_sign_binaries(ns);
      for (int i : steps) {
        const int agents[2] = {we, ns};
        for (int pattern = 0; pattern < 4; ++pattern) {
          const double sigma[2] = {(pattern & 1) ? -1.0 : 1.0, (pattern & 2) ? -1.0 : 1.0};
          // Lowest value of sigma_a * a + sigma_b * b over the reachable box.
          double floor_value = 0.0;
          std::vector<Term> terms;
          double mismatch_const = 0.0;
          std::vector<std::pair<int, double>> mismatch_terms;
          bool never_selected = false;
          for (int k = 0; k < 2; ++k) {
            const int ag = agents[k];
            const double lo = reach_lo[ag][i], hi = reach_hi[ag][i];
            floor_value += sigma[k] > 0 ? lo : -hi;
            terms.push_back({map.state(ag, i, 0), sigma[k]});
            const int z = map.sign_binary(ag, i);
            const auto& def = p.variables()[z];
            // mismatch is (1 - z) for the positive sign, z for the negative one
            if (def.lower == def.upper) {
              const double m = sigma[k] > 0 ? 1.0 - def.lower : def.lower;
              if (m > 0.5) never_selected = true;
            } else if (sigma[k] > 0) {
              mismatch_const += 1.0;
              mismatch_terms.emplace_back(z, -1.0);
            } else {
              mismatch_terms.emplace_back(z, 1.0);
            }
          }
          if (never_selected) continue;
          if (floor_value >= s) continue;
          const double big_m = std::min(cfg.weights.big_M, s - floor_value);
          // sigma.x + M * mismatch >= s
          for (const auto& [z, c] : mismatch_terms) terms.push_back({z, big_m * c});
          p.add_constraint(std::move(terms), Sense::greater_equal, s - big_m * mismatch_const);
        }
      }
    }
  }

  // One binary per cross pair fixes which agent leads through the whole
  // horizon: o = 1 keeps the west-east agent ahead.
  void add_intersection_separation_fixed_order() {
    auto& p = out.problem;
    const double s = cfg.s_dist;
    for (const auto& [we, ns] : out.pairs.cross) {
      const int o = p.add_binary(opts.name_variables ? "o_a" + std::to_string(scene.agents[we].id) + "_a" +
                                                           std::to_string(scene.agents[ns].id)
                                                     : std::string());
      out.map.order_.push_back(o);
      for (int i = 1; i <= cfg.horizon; ++i) {
        const double lo_diff = reach_lo[we][i] - reach_hi[ns][i];
        const double hi_diff = reach_hi[we][i] - reach_lo[ns][i];
        if (min_abs(reach_lo[we][i], reach_hi[we][i]) + min_abs(reach_lo[ns][i], reach_hi[ns][i]) >= s) continue;
        const int a = out.map.state(we, i, 0), b = out.map.state(ns, i, 0);
        // a - b >= s - M (1 - o)
        const double m1 = std::min(cfg.weights.big_M, std::max(0.0, s - lo_diff));
        p.add_constraint({{a, 1.0}, {b, -1.0}, {o, -m1}}, Sense::greater_equal, s - m1);
        // b - a >= s - M o
        const double m2 = std::min(cfg.weights.big_M, std::max(0.0, s + hi_diff));
        p.add_constraint({{b, 1.0}, {a, -1.0}, {o, m2}}, Sense::greater_equal, s);
      }
    }
  }

  void build_objective() {
    const int n = cfg.horizon;
    const auto& w = cfg.weights;
    const auto& map = out.map;
    std::vector<Term> terms;
    double constant = 0.0;
    for (int a = 0; a < static_cast<int>(scene.agents.size()); ++a) {
      constant += w.lambda_v * scene.agents[a].state.vel;
      for (int i = 1; i <= n - 1; ++i) {
        if (w.lambda_v != 0.0) terms.push_back({map.state(a, i, 1), w.lambda_v});
        for (int c = 0; c < 2; ++c) {
          const double coef = w.qo[c] + (i == n - 1 ? w.po[c] : 0.0);
          if (coef != 0.0) terms.push_back({map.slack(a, i, c), -coef});
        }
      }
    }
    out.problem.set_objective(milp::ObjectiveSense::maximize, std::move(terms), constant);
  }

  BuiltModel run() {
    if (scene.agents.empty()) throw std::invalid_argument("build_model: empty scene");
    if (cfg.horizon < 2) throw std::invalid_argument("build_model: horizon must be at least 2");
    if (cfg.u_min > cfg.u_max) throw std::invalid_argument("build_model: u_min exceeds u_max");
    if (!(cfg.v_max > 0.0) || !(cfg.dt > 0.0)) throw std::invalid_argument("build_model: v_max and dt must be positive");

    out.pairs = opts.pairs ? *opts.pairs : default_pairs(scene, cfg);
    const int count = static_cast<int>(scene.agents.size());
    for (const auto& [x, y] : out.pairs.same_lane) {
      if (x < 0 || y < 0 || x >= count || y >= count || x == y) throw std::invalid_argument("build_model: bad same-lane pair");
    }
    for (const auto& [x, y] : out.pairs.cross) {
      if (x < 0 || y < 0 || x >= count || y >= count || scene.agents[x].lane != Lane::west_east ||
          scene.agents[y].lane != Lane::north_south) {
        throw std::invalid_argument("build_model: bad cross pair");
      }
    }
    for (const auto& ag : scene.agents) {
      auto [lo, hi] = reachable_positions(ag.state, cfg);
      reach_lo.push_back(std::move(lo));
      reach_hi.push_back(std::move(hi));
    }

    out.map.horizon_ = cfg.horizon;
    out.map.sign_base_.assign(count, -1);
    add_agent_variables();
    add_deviation_constraints();
    add_dynamics_constraints();
    add_same_lane_separation();
    if (cfg.fixed_crossing_order) {
      add_intersection_separation_fixed_order();
    } else {
      add_intersection_separation_per_step();
    }
    build_objective();
    return std::move(out);
  }
};

BuiltModel build_model(const SceneSnapshot& scene, const SimConfig& cfg, const BuildOptions& opts) {
  ModelBuilder builder{scene, cfg, opts, {}, {}, {}};
  return builder.run();
}

PlanError::PlanError(milp::SolveStatus status)
    : std::runtime_error(std::string("no plan: solver status ") + milp::to_string(status)), status_(status) {}

HorizonPlan extract_plan(const milp::MilpSolution& solution, const BuiltModel& model, const SceneSnapshot& scene) {
  if (solution.status != milp::SolveStatus::optimal) throw PlanError(solution.status);
  const auto& map = model.map;
  const int n = map.horizon();
  HorizonPlan plan;
  for (int a = 0; a < map.num_agents(); ++a) {
    AgentPlan ap;
    ap.id = scene.agents[a].id;
    ap.states.push_back(scene.agents[a].state);
    for (int i = 1; i <= n; ++i) {
      ap.states.push_back({solution.values[map.state(a, i, 0)], solution.values[map.state(a, i, 1)]});
    }
    for (int i = 0; i < n; ++i) ap.controls.push_back(solution.values[map.control(a, i)]);
    plan.agents.push_back(std::move(ap));
  }
  return plan;
}

}  // namespace crossflow
