#pragma once

#include "aoc/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aoc::env {

enum class EnvKind { PendulumHet, Maze, TwoGatesMaze };

enum class PendulumMode { Normal, Converse };

enum class StartDistribution { SwingUp, NearUpright };

struct Gate {
    double y_lo = 0.0;
    double y_hi = 0.0;
};

// One config type covers both simulators; unused fields are ignored by the
// other environment kind.
struct EnvConfig {
    EnvKind kind = EnvKind::PendulumHet;
    double dt = 0.05;
    int horizon = 200;

    // Pendulum physics & reward.
    double gravity = 10.0;
    double mass = 1.0;
    double length = 1.0;
    double torque_limit = 2.0;
    double theta_dot_limit = 8.0;
    double angle_cost = 1.0;
    double velocity_cost = 0.1;
    double torque_cost = 0.001;
    StartDistribution start = StartDistribution::SwingUp;

    // Maze geometry & reward.
    double wall_x = 8.0;
    std::vector<Gate> gates;
    double box_lo = 0.0;
    double box_hi = 16.0;
    Eigen::Vector2d start_pos{0.0, 0.0};
    Eigen::Vector2d goal{16.0, 0.0};
    double goal_radius = 0.5;
    double step_cost = 0.01;
    double goal_reward = 10.0;
    bool terminate_on_goal = true;

    uint64_t seed = 0;

    int obs_dim() const { return kind == EnvKind::PendulumHet ? 3 : 2; }
    int action_dim() const { return kind == EnvKind::PendulumHet ? 1 : 2; }
    double action_bound() const { return kind == EnvKind::PendulumHet ? torque_limit : 1.0; }
};

EnvConfig make_pendulum_config();
EnvConfig make_maze_config();
EnvConfig make_two_gates_config();

struct Transition {
    int episode_id = 0;
    int t = 0;
    Vec obs;
    Vec action;
    double reward = 0.0;
    Vec next_obs;
    std::string policy_tag;
    std::optional<std::string> mode_tag;
    bool done = false;
};

using Trajectory = std::vector<Transition>;

}  // namespace aoc::env
