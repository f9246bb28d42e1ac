#pragma once

#include "aoc/env/types.hpp"
#include "aoc/rng.hpp"

namespace aoc::env {

struct MazeState {
    Eigen::Vector2d position{0.0, 0.0};
    bool goal_reached = false;  // goal bonus is paid once per episode

    Vec to_vec() const {
        Vec v(2);
        v << position.x(), position.y();
        return v;
    }
};

struct MazeStepResult {
    MazeState state;
    double reward = 0.0;
    bool done = false;
};

// True when the segment from `from` to `to` crosses the interior wall at a
// non-gate y. Touching the wall plane from one side does not count.
bool crosses_wall(const Eigen::Vector2d& from, const Eigen::Vector2d& to, const EnvConfig& cfg);

MazeStepResult maze_step(const MazeState& state, const Eigen::Vector2d& action, const EnvConfig& cfg);

enum class MazeAgent { Pi1, Pi2, Pi3, Pi4 };

const char* maze_agent_tag(MazeAgent agent);
Eigen::Vector2d maze_agent_start(MazeAgent agent);
Eigen::Vector2d maze_agent_goal(MazeAgent agent);

// Waypoint-following proportional controller: heads for the agent's gate
// while the wall blocks the straight line to the goal, then for the goal.
// Gaussian noise sigma=0.1 per component, clipped to [-1, 1].
Eigen::Vector2d expert_policy(MazeAgent agent, const MazeState& state, const EnvConfig& cfg, Rng& rng);

// The Two Gates behavior policies, one per gate: head for the chosen gate
// center, then the goal.
Eigen::Vector2d two_gates_policy(int gate_index, const MazeState& state, const EnvConfig& cfg, Rng& rng);

}  // namespace aoc::env
