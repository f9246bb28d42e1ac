#pragma once

#include "aoc/env/types.hpp"
#include "aoc/rng.hpp"

namespace aoc::env {

struct PendulumState {
    double theta = 0.0;      // radians, wrapped to [-pi, pi], 0 = upright
    double theta_dot = 0.0;  // radians/second
    PendulumMode mode = PendulumMode::Normal;
};

struct PendulumObservation {
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    double theta_dot = 0.0;

    Vec to_vec() const {
        Vec v(3);
        v << cos_theta, sin_theta, theta_dot;
        return v;
    }
};

double wrap_angle(double theta);

PendulumObservation observe(const PendulumState& state);

struct PendulumStepResult {
    PendulumState state;
    double reward = 0.0;
};

// Normal mode integrates theta_ddot = (3g/2l) sin(theta) + 3/(m l^2) u with
// semi-implicit Euler; Converse mode is the identical system driven by -u.
PendulumStepResult pendulum_step(const PendulumState& state, double torque, const EnvConfig& cfg);

PendulumState pendulum_reset(const EnvConfig& cfg, PendulumMode mode, Rng& rng);

// Scripted data collector: energy-based swing-up plus PD balance near
// upright, with epsilon-greedy uniform exploration. `matched` selects the
// controller for the episode's mode (the Converse controller negates its
// output); passing matched=false runs the Normal controller as-is, which is
// how the heterogeneity of the two systems is measured.
double pendulum_behavior_torque(const PendulumObservation& obs, PendulumMode mode,
                                const EnvConfig& cfg, Rng& rng, bool matched = true,
                                double epsilon_greedy = 0.2);

}  // namespace aoc::env
