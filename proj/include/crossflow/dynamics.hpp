#pragma once

#include <array>

namespace crossflow {

/// Longitudinal state of one agent in its lane frame: position along the
/// direction of travel (intersection center at 0) and speed.
struct StateVector {
  double pos = 0.0;  // m
  double vel = 0.0;  // m/s
};

/// Zero-order-hold discretization of the double integrator:
/// A = [[1, dt], [0, 1]], B = [dt^2/2, dt].
struct DynamicsMatrices {
  std::array<std::array<double, 2>, 2> a{};
  std::array<double, 2> b{};
  double dt = 0.0;
};

// Throws std::invalid_argument for dt <= 0 or non-finite dt.
DynamicsMatrices discretize_double_integrator(double dt);

StateVector step(const StateVector& state, double u, const DynamicsMatrices& mats);

// Constant-speed advance used outside the control region.
double kinematic_advance(double pos, double v, double dt);

}  // namespace crossflow
