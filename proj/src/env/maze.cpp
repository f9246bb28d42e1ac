#include "aoc/env/maze.hpp"

#include <cmath>

namespace aoc::env {

namespace {
constexpr double kWallMargin = 1e-6;

bool y_in_gate(double y, const EnvConfig& cfg) {
    for (const Gate& g : cfg.gates) {
        if (y >= g.y_lo && y <= g.y_hi) return true;
    }
    return false;
}
}  // namespace

bool crosses_wall(const Eigen::Vector2d& from, const Eigen::Vector2d& to, const EnvConfig& cfg) {
    const double a = from.x() - cfg.wall_x;
    const double b = to.x() - cfg.wall_x;
    if (a * b >= 0.0) return false;
    const double s = a / (a - b);  // crossing parameter in (0, 1)
    const double y = from.y() + s * (to.y() - from.y());
    return !y_in_gate(y, cfg);
}

MazeStepResult maze_step(const MazeState& state, const Eigen::Vector2d& action, const EnvConfig& cfg) {
    Eigen::Vector2d a(clip(action.x(), -1.0, 1.0), clip(action.y(), -1.0, 1.0));
    Eigen::Vector2d target = state.position + a;

    if (crosses_wall(state.position, target, cfg)) {
        // Stop at the wall face with the contact margin.
        const double da = state.position.x() - cfg.wall_x;
        const double db = target.x() - cfg.wall_x;
        const double s = da / (da - db);
        const double y = state.position.y() + s * (target.y() - state.position.y());
        const double side = (da > 0.0) ? 1.0 : -1.0;
        target = {cfg.wall_x + side * kWallMargin, y};
    }
    target.x() = clip(target.x(), cfg.box_lo, cfg.box_hi);
    target.y() = clip(target.y(), cfg.box_lo, cfg.box_hi);

    MazeStepResult res;
    res.state = state;
    res.state.position = target;
    res.reward = -cfg.step_cost;
    if (!state.goal_reached && (target - cfg.goal).norm() <= cfg.goal_radius) {
        res.reward += cfg.goal_reward;
        res.state.goal_reached = true;
        res.done = cfg.terminate_on_goal;
    }
    return res;
}

const char* maze_agent_tag(MazeAgent agent) {
    switch (agent) {
        case MazeAgent::Pi1: return "pi1";
        case MazeAgent::Pi2: return "pi2";
        case MazeAgent::Pi3: return "pi3";
        case MazeAgent::Pi4: return "pi4";
    }
    return "?";
}

Eigen::Vector2d maze_agent_start(MazeAgent agent) {
    switch (agent) {
        case MazeAgent::Pi1: return {0.0, 0.0};
        case MazeAgent::Pi2: return {0.0, 0.0};
        case MazeAgent::Pi3: return {8.0, 16.0};
        case MazeAgent::Pi4: return {8.0, 8.0};
    }
    return {0.0, 0.0};
}

Eigen::Vector2d maze_agent_goal(MazeAgent agent) {
    switch (agent) {
        case MazeAgent::Pi1: return {8.0, 16.0};
        case MazeAgent::Pi2: return {8.0, 8.0};
        case MazeAgent::Pi3: return {16.0, 0.0};
        case MazeAgent::Pi4: return {16.0, 0.0};
    }
    return {0.0, 0.0};
}

namespace {

Eigen::Vector2d steer(const Eigen::Vector2d& pos, const Eigen::Vector2d& goal,
                      const Eigen::Vector2d& gate_center, const EnvConfig& cfg, Rng& rng) {
    Eigen::Vector2d target = crosses_wall(pos, goal, cfg) ? gate_center : goal;
    Eigen::Vector2d dir = target - pos;
    const double dist = dir.norm();
    Eigen::Vector2d a = Eigen::Vector2d::Zero();
    if (dist > 1e-12) a = dir / dist * std::min(1.0, dist);
    a.x() = clip(a.x() + rng.normal(0.0, 0.1), -1.0, 1.0);
    a.y() = clip(a.y() + rng.normal(0.0, 0.1), -1.0, 1.0);
    return a;
}

}  // namespace

Eigen::Vector2d expert_policy(MazeAgent agent, const MazeState& state, const EnvConfig& cfg, Rng& rng) {
    const Eigen::Vector2d goal = maze_agent_goal(agent);
    const bool upper = (agent == MazeAgent::Pi1 || agent == MazeAgent::Pi3);
    const Gate& gate = cfg.gates.at(upper ? 0 : 1);
    const Eigen::Vector2d gate_center(cfg.wall_x, 0.5 * (gate.y_lo + gate.y_hi));
    return steer(state.position, goal, gate_center, cfg, rng);
}

Eigen::Vector2d two_gates_policy(int gate_index, const MazeState& state, const EnvConfig& cfg, Rng& rng) {
    const Gate& gate = cfg.gates.at(static_cast<size_t>(gate_index));
    const Eigen::Vector2d gate_center(cfg.wall_x, 0.5 * (gate.y_lo + gate.y_hi));
    // Commit to the assigned gate until through the wall.
    const Eigen::Vector2d& pos = state.position;
    Eigen::Vector2d target = (pos.x() < cfg.wall_x - 0.2) ? gate_center : Eigen::Vector2d(cfg.goal);
    if (crosses_wall(pos, target, cfg)) target = gate_center;
    Eigen::Vector2d dir = target - pos;
    const double dist = dir.norm();
    Eigen::Vector2d a = Eigen::Vector2d::Zero();
    if (dist > 1e-12) a = dir / dist * std::min(1.0, dist);
    a.x() = clip(a.x() + rng.normal(0.0, 0.1), -1.0, 1.0);
    a.y() = clip(a.y() + rng.normal(0.0, 0.1), -1.0, 1.0);
    return a;
}

}  // namespace aoc::env
