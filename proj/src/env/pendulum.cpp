#include "aoc/env/pendulum.hpp"

#include <cmath>

namespace aoc::env {

double wrap_angle(double theta) {
    theta = std::fmod(theta + M_PI, 2.0 * M_PI);
    if (theta < 0.0) theta += 2.0 * M_PI;
    return theta - M_PI;
}

PendulumObservation observe(const PendulumState& state) {
    return {std::cos(state.theta), std::sin(state.theta), state.theta_dot};
}

PendulumStepResult pendulum_step(const PendulumState& state, double torque, const EnvConfig& cfg) {
    if (!std::isfinite(state.theta) || !std::isfinite(state.theta_dot)) {
        throw Error(ErrorCategory::numeric_divergence, "pendulum state is not finite");
    }
    if (!std::isfinite(torque)) {
        throw Error(ErrorCategory::numeric_divergence, "pendulum torque is not finite");
    }

    double u = clip(torque, -cfg.torque_limit, cfg.torque_limit);
    if (state.mode == PendulumMode::Converse) u = -u;

    const double theta = state.theta;
    const double theta_dot = state.theta_dot;

    // Cost on the pre-step state with the applied torque.
    const double wrapped = wrap_angle(theta);
    const double reward = -(cfg.angle_cost * wrapped * wrapped +
                            cfg.velocity_cost * theta_dot * theta_dot +
                            cfg.torque_cost * u * u);

    const double g = cfg.gravity;
    const double m = cfg.mass;
    const double l = cfg.length;
    const double theta_ddot = (3.0 * g / (2.0 * l)) * std::sin(theta) + (3.0 / (m * l * l)) * u;

    PendulumState next = state;
    next.theta_dot = clip(theta_dot + theta_ddot * cfg.dt, -cfg.theta_dot_limit, cfg.theta_dot_limit);
    next.theta = wrap_angle(theta + next.theta_dot * cfg.dt);

    if (!std::isfinite(next.theta) || !std::isfinite(next.theta_dot)) {
        throw Error(ErrorCategory::numeric_divergence, "pendulum step diverged");
    }
    return {next, reward};
}

PendulumState pendulum_reset(const EnvConfig& cfg, PendulumMode mode, Rng& rng) {
    PendulumState s;
    s.mode = mode;
    if (cfg.start == StartDistribution::SwingUp) {
        s.theta = rng.uniform(-M_PI, M_PI);
        s.theta_dot = rng.uniform(-1.0, 1.0);
    } else {
        s.theta = rng.uniform(-0.25, 0.25);
        s.theta_dot = rng.uniform(-0.25, 0.25);
    }
    return s;
}

double pendulum_behavior_torque(const PendulumObservation& obs, PendulumMode mode,
                                const EnvConfig& cfg, Rng& rng, bool matched,
                                double epsilon_greedy) {
    const double theta = std::atan2(obs.sin_theta, obs.cos_theta);
    const double theta_dot = obs.theta_dot;

    double u;
    if (std::abs(theta) < 0.35 && std::abs(theta_dot) < 2.0) {
        u = -12.0 * theta - 3.0 * theta_dot;
    } else {
        // Pump or drain rotational energy toward the upright-rest level.
        const double m = cfg.mass, l = cfg.length, g = cfg.gravity;
        const double inertia = m * l * l / 3.0;
        const double energy = 0.5 * inertia * theta_dot * theta_dot +
                              0.5 * m * g * l * obs.cos_theta;
        const double target = 0.5 * m * g * l;
        double direction = theta_dot;
        if (std::abs(direction) < 1e-3) direction = (theta >= 0.0) ? 1.0 : -1.0;
        u = 2.0 * (target - energy) * (direction > 0.0 ? 1.0 : -1.0);
    }
    u = clip(u, -cfg.torque_limit, cfg.torque_limit);

    if (epsilon_greedy > 0.0 && rng.uniform() < epsilon_greedy) {
        u = rng.uniform(-cfg.torque_limit, cfg.torque_limit);
    }
    if (matched && mode == PendulumMode::Converse) u = -u;
    return u;
}

}  // namespace aoc::env
