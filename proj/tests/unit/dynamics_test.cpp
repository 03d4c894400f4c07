#include <doctest.h>

#include <random>
#include <stdexcept>

#include "crossflow/dynamics.hpp"

using namespace crossflow;

TEST_CASE("discretization matches zero-order hold") {
  const auto m = discretize_double_integrator(0.1);
  CHECK(m.a[0][0] == 1.0);
  CHECK(m.a[0][1] == doctest::Approx(0.1));
  CHECK(m.a[1][0] == 0.0);
  CHECK(m.a[1][1] == 1.0);
  CHECK(m.b[0] == doctest::Approx(0.005));
  CHECK(m.b[1] == doctest::Approx(0.1));

  const auto unit = discretize_double_integrator(1.0);
  CHECK(unit.a[0][1] == 1.0);
  CHECK(unit.b[0] == 0.5);
  CHECK(unit.b[1] == 1.0);

  CHECK_THROWS_AS(discretize_double_integrator(0.0), std::invalid_argument);
  CHECK_THROWS_AS(discretize_double_integrator(-0.1), std::invalid_argument);
}

TEST_CASE("step examples") {
  const auto m = discretize_double_integrator(0.1);
  auto s = step({0.0, 15.0}, 0.0, m);
  CHECK(s.pos == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.vel == 15.0);
  s = step({0.0, 0.0}, 2.0, m);
  CHECK(s.pos == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(s.vel == doctest::Approx(0.2).epsilon(1e-12));
  s = step({100.0, 10.0}, -5.0, m);
  CHECK(s.pos == doctest::Approx(100.975).epsilon(1e-12));
  CHECK(s.vel == doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("kinematic advance") {
  CHECK(kinematic_advance(-200.0, 15.0, 0.1) == doctest::Approx(-198.5));
  CHECK(kinematic_advance(42.0, 0.0, 0.1) == 42.0);
  CHECK(kinematic_advance(-200.0, 15.0, 1.0) == -185.0);
}

TEST_CASE("step is linear, replays closed form, and accumulates exactly under zero input") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  std::uniform_real_distribution<double> dt_dist(0.01, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = discretize_double_integrator(dt_dist(rng));
    const StateVector s1{uni(rng), uni(rng)};
    const StateVector s2{uni(rng), uni(rng)};
    const double u1 = uni(rng), u2 = uni(rng), a = uni(rng), b = uni(rng);
    const StateVector mix{a * s1.pos + b * s2.pos, a * s1.vel + b * s2.vel};
    const auto lhs = step(mix, a * u1 + b * u2, m);
    const auto r1 = step(s1, u1, m);
    const auto r2 = step(s2, u2, m);
    const double scale = 1.0 + std::abs(lhs.pos) + std::abs(lhs.vel);
    CHECK(std::abs(lhs.pos - (a * r1.pos + b * r2.pos)) <= 1e-12 * scale * 100);
    CHECK(std::abs(lhs.vel - (a * r1.vel + b * r2.vel)) <= 1e-12 * scale * 100);

    const auto closed = s1.pos + s1.vel * m.dt + 0.5 * u1 * m.dt * m.dt;
    CHECK(std::abs(r1.pos - closed) <= 1e-12 * (1.0 + std::abs(closed)));
  }

  const auto m = discretize_double_integrator(0.1);
  StateVector s{-200.0, 15.0};
  for (int i = 0; i < 1000; ++i) s = step(s, 0.0, m);
  CHECK(std::abs(s.pos - (-200.0 + 1000 * 0.1 * 15.0)) <= 1e-9);
  CHECK(s.vel == 15.0);
}
