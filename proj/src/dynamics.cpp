#include "crossflow/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crossflow {

DynamicsMatrices discretize_double_integrator(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("discretization step must be positive, got " + std::to_string(dt));
  }
  DynamicsMatrices m;
  m.a = {{{1.0, dt}, {0.0, 1.0}}};
  m.b = {0.5 * dt * dt, dt};
  m.dt = dt;
  return m;
}

StateVector step(const StateVector& s, double u, const DynamicsMatrices& m) {
  return {m.a[0][0] * s.pos + m.a[0][1] * s.vel + m.b[0] * u,
          m.a[1][0] * s.pos + m.a[1][1] * s.vel + m.b[1] * u};
}

double kinematic_advance(double pos, double v, double dt) { return pos + v * dt; }

}  // namespace crossflow
