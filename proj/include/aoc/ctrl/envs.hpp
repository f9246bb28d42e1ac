#pragma once

#include "aoc/ctrl/controller.hpp"
#include "aoc/env/maze.hpp"
#include "aoc/env/pendulum.hpp"

namespace aoc::ctrl {

enum class PendulumModePolicy { Random, FixedNormal, FixedConverse };

class PendulumRolloutEnv : public RolloutEnv {
public:
    explicit PendulumRolloutEnv(env::EnvConfig cfg,
                                PendulumModePolicy mode_policy = PendulumModePolicy::Random)
        : cfg_(std::move(cfg)), mode_policy_(mode_policy) {}

    int obs_dim() const override { return 3; }
    int action_dim() const override { return 1; }
    Vec action_low() const override { return Vec::Constant(1, -cfg_.torque_limit); }
    Vec action_high() const override { return Vec::Constant(1, cfg_.torque_limit); }
    int horizon() const override { return cfg_.horizon; }

    Vec reset(Rng& rng) override {
        env::PendulumMode mode = env::PendulumMode::Normal;
        if (mode_policy_ == PendulumModePolicy::FixedConverse) {
            mode = env::PendulumMode::Converse;
        } else if (mode_policy_ == PendulumModePolicy::Random) {
            mode = rng.uniform() < 0.5 ? env::PendulumMode::Normal : env::PendulumMode::Converse;
        }
        state_ = env::pendulum_reset(cfg_, mode, rng);
        return env::observe(state_).to_vec();
    }

    Step step(const Vec& action) override {
        const env::PendulumStepResult res = env::pendulum_step(state_, action(0), cfg_);
        state_ = res.state;
        return {env::observe(state_).to_vec(), res.reward, false};
    }

    env::PendulumMode mode() const { return state_.mode; }

private:
    env::EnvConfig cfg_;
    PendulumModePolicy mode_policy_;
    env::PendulumState state_;
};

class MazeRolloutEnv : public RolloutEnv {
public:
    explicit MazeRolloutEnv(env::EnvConfig cfg) : cfg_(std::move(cfg)) {}

    int obs_dim() const override { return 2; }
    int action_dim() const override { return 2; }
    Vec action_low() const override { return Vec::Constant(2, -1.0); }
    Vec action_high() const override { return Vec::Constant(2, 1.0); }
    int horizon() const override { return cfg_.horizon; }

    Vec reset(Rng&) override {
        state_ = env::MazeState{};
        state_.position = cfg_.start_pos;
        return state_.to_vec();
    }

    Step step(const Vec& action) override {
        const env::MazeStepResult res = env::maze_step(state_, {action(0), action(1)}, cfg_);
        state_ = res.state;
        return {state_.to_vec(), res.reward, res.done};
    }

    const env::MazeState& state() const { return state_; }

private:
    env::EnvConfig cfg_;
    env::MazeState state_;
};

}  // namespace aoc::ctrl
