#pragma once

#include "aoc/env/types.hpp"
#include "aoc/rng.hpp"

#include <string>
#include <vector>

namespace aoc::env {

struct PolicySpec {
    enum class Kind { PendulumEnergy, MazeExperts, TwoGates, Clinic } kind = Kind::PendulumEnergy;
    double epsilon_greedy = 0.2;    // pendulum exploration
    int trajectories_per_policy = 250;  // maze experts / two-gates
    int data_horizon = 30;          // maze data episodes run a fixed horizon
    // Clinic (strictly-batch imitation substitute).
    int clinic_episodes = 400;
    int clinic_length = 40;
    double clinic_flip_prob = 0.05;
};

// Rolls out the scripted behavior policies. Pendulum-Het alternates
// Normal/Converse episodes and stops at the first episode boundary at or
// beyond n_transitions; maze-style specs generate trajectories_per_policy
// episodes per behavior policy. Fully reproducible from (cfg, spec, seed).
std::vector<Trajectory> generate_dataset(const EnvConfig& cfg, const PolicySpec& spec,
                                         int n_transitions, uint64_t seed);

// Synthetic two-regime clinic data for the strictly-batch imitation setting:
// binary treatment whose effect direction depends on a hidden regime carried
// in the policy tag. Actions are one-hot encoded.
std::vector<Trajectory> generate_clinic_dataset(const PolicySpec& spec, uint64_t seed);

void save_dataset_jsonl(const std::vector<Trajectory>& trajectories, const std::string& path);
std::vector<Trajectory> load_dataset_jsonl(const std::string& path);

int count_transitions(const std::vector<Trajectory>& trajectories);

}  // namespace aoc::env
