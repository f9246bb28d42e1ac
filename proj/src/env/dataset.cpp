#include "aoc/env/dataset.hpp"
#include "aoc/env/maze.hpp"
#include "aoc/env/pendulum.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace aoc::env {

EnvConfig make_pendulum_config() {
    EnvConfig cfg;
    cfg.kind = EnvKind::PendulumHet;
    return cfg;
}

EnvConfig make_maze_config() {
    EnvConfig cfg;
    cfg.kind = EnvKind::Maze;
    cfg.horizon = 200;
    cfg.gates = {{14.0, 16.0}, {7.0, 9.0}};
    cfg.start_pos = {0.0, 0.0};
    cfg.goal = {16.0, 0.0};
    return cfg;
}

EnvConfig make_two_gates_config() {
    EnvConfig cfg;
    cfg.kind = EnvKind::TwoGatesMaze;
    cfg.horizon = 200;
    cfg.gates = {{11.0, 13.0}, {3.0, 5.0}};
    cfg.start_pos = {0.0, 8.0};
    cfg.goal = {16.0, 8.0};
    return cfg;
}

namespace {

Trajectory roll_pendulum_episode(const EnvConfig& cfg, PendulumMode mode, int episode_id,
                                 double epsilon_greedy, Rng& rng) {
    Trajectory traj;
    traj.reserve(cfg.horizon);
    PendulumState state = pendulum_reset(cfg, mode, rng);
    for (int t = 0; t < cfg.horizon; ++t) {
        const PendulumObservation obs = observe(state);
        const double u = pendulum_behavior_torque(obs, mode, cfg, rng, true, epsilon_greedy);
        const PendulumStepResult res = pendulum_step(state, u, cfg);

        Transition tr;
        tr.episode_id = episode_id;
        tr.t = t;
        tr.obs = obs.to_vec();
        tr.action = Vec::Constant(1, u);
        tr.reward = res.reward;
        tr.next_obs = observe(res.state).to_vec();
        tr.policy_tag = "energy";
        tr.mode_tag = (mode == PendulumMode::Normal) ? "normal" : "converse";
        tr.done = (t == cfg.horizon - 1);
        traj.push_back(std::move(tr));
        state = res.state;
    }
    return traj;
}

template <typename PolicyFn>
Trajectory roll_maze_episode(const EnvConfig& cfg, const Eigen::Vector2d& start, int horizon,
                             int episode_id, const std::string& tag, PolicyFn&& policy, Rng& rng) {
    Trajectory traj;
    MazeState state;
    state.position = start;
    for (int t = 0; t < horizon; ++t) {
        const Eigen::Vector2d a = policy(state, rng);
        const MazeStepResult res = maze_step(state, a, cfg);

        Transition tr;
        tr.episode_id = episode_id;
        tr.t = t;
        tr.obs = state.to_vec();
        tr.action = Vec(2);
        tr.action << clip(a.x(), -1.0, 1.0), clip(a.y(), -1.0, 1.0);
        tr.reward = res.reward;
        tr.next_obs = res.state.to_vec();
        tr.policy_tag = tag;
        tr.done = res.done || (t == horizon - 1);
        traj.push_back(std::move(tr));
        state = res.state;
        if (res.done) break;
    }
    return traj;
}

}  // namespace

std::vector<Trajectory> generate_dataset(const EnvConfig& cfg, const PolicySpec& spec,
                                         int n_transitions, uint64_t seed) {
    if (spec.kind == PolicySpec::Kind::Clinic) return generate_clinic_dataset(spec, seed);

    std::vector<Trajectory> out;
    if (spec.kind == PolicySpec::Kind::PendulumEnergy) {
        if (n_transitions <= 0) {
            throw Error(ErrorCategory::invalid_argument, "n_transitions must be positive");
        }
        int total = 0;
        int episode = 0;
        // Alternate modes so the two systems split the transition count
        // evenly (within one episode).
        while (total < n_transitions) {
            const PendulumMode mode = (episode % 2 == 0) ? PendulumMode::Normal : PendulumMode::Converse;
            Rng rng(Rng::derive(seed, static_cast<uint64_t>(episode)));
            out.push_back(roll_pendulum_episode(cfg, mode, episode, spec.epsilon_greedy, rng));
            total += static_cast<int>(out.back().size());
            ++episode;
        }
        return out;
    }

    // Maze-style data: fixed-horizon episodes, goal bonus paid once, the
    // expert hovers at its goal for the remaining steps.
    EnvConfig data_cfg = cfg;
    data_cfg.terminate_on_goal = false;

    int episode = 0;
    if (spec.kind == PolicySpec::Kind::MazeExperts) {
        for (MazeAgent agent : {MazeAgent::Pi1, MazeAgent::Pi2, MazeAgent::Pi3, MazeAgent::Pi4}) {
            EnvConfig agent_cfg = data_cfg;
            agent_cfg.goal = maze_agent_goal(agent);
            for (int i = 0; i < spec.trajectories_per_policy; ++i) {
                Rng rng(Rng::derive(seed, static_cast<uint64_t>(episode)));
                out.push_back(roll_maze_episode(
                    agent_cfg, maze_agent_start(agent), spec.data_horizon, episode,
                    maze_agent_tag(agent),
                    [&](const MazeState& s, Rng& r) { return expert_policy(agent, s, agent_cfg, r); },
                    rng));
                ++episode;
            }
        }
        return out;
    }

    if (spec.kind == PolicySpec::Kind::TwoGates) {
        for (int gate = 0; gate < 2; ++gate) {
            const std::string tag = (gate == 0) ? "gate_upper" : "gate_lower";
            for (int i = 0; i < spec.trajectories_per_policy; ++i) {
                Rng rng(Rng::derive(seed, static_cast<uint64_t>(episode)));
                out.push_back(roll_maze_episode(
                    data_cfg, data_cfg.start_pos, spec.data_horizon, episode, tag,
                    [&](const MazeState& s, Rng& r) { return two_gates_policy(gate, s, data_cfg, r); },
                    rng));
                ++episode;
            }
        }
        return out;
    }

    throw Error(ErrorCategory::invalid_argument, "unknown policy spec kind");
}

std::vector<Trajectory> generate_clinic_dataset(const PolicySpec& spec, uint64_t seed) {
    std::vector<Trajectory> out;
    out.reserve(spec.clinic_episodes);
    for (int ep = 0; ep < spec.clinic_episodes; ++ep) {
        Rng rng(Rng::derive(seed, static_cast<uint64_t>(ep)));
        const int regime = ep % 2;
        const std::string tag = (regime == 0) ? "regime0" : "regime1";
        double vital = rng.uniform(0.2, 0.8);

        Trajectory traj;
        traj.reserve(spec.clinic_length);
        for (int t = 0; t < spec.clinic_length; ++t) {
            // Expert keeps the vital near 0.5; the action that raises it
            // depends on the hidden regime.
            const int rule_action = (vital < 0.5) ? (regime == 0 ? 1 : 0) : (regime == 0 ? 0 : 1);
            int action = rule_action;
            if (rng.uniform() < spec.clinic_flip_prob) action = 1 - action;

            const int raising = (regime == 0) ? 1 : 0;
            const double effect = (action == raising) ? 0.15 : -0.15;
            const double next_vital = clip(vital + effect + rng.normal(0.0, 0.02), 0.0, 1.0);

            Transition tr;
            tr.episode_id = ep;
            tr.t = t;
            tr.obs = Vec::Constant(1, vital);
            tr.action = Vec::Zero(2);
            tr.action(action) = 1.0;
            tr.reward = 0.0;
            tr.next_obs = Vec::Constant(1, next_vital);
            tr.policy_tag = tag;
            tr.mode_tag = tag;
            tr.done = (t == spec.clinic_length - 1);
            traj.push_back(std::move(tr));
            vital = next_vital;
        }
        out.push_back(std::move(traj));
    }
    return out;
}

int count_transitions(const std::vector<Trajectory>& trajectories) {
    int n = 0;
    for (const Trajectory& t : trajectories) n += static_cast<int>(t.size());
    return n;
}

namespace {

void append_vec(std::string& s, const Vec& v) {
    s += '[';
    for (int i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt17(v(i));
    }
    s += ']';
}

}  // namespace

void save_dataset_jsonl(const std::vector<Trajectory>& trajectories, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);
    std::string line;
    for (const Trajectory& traj : trajectories) {
        for (const Transition& tr : traj) {
            line.clear();
            line += "{\"episode_id\":" + std::to_string(tr.episode_id);
            line += ",\"t\":" + std::to_string(tr.t);
            line += ",\"obs\":";
            append_vec(line, tr.obs);
            line += ",\"action\":";
            append_vec(line, tr.action);
            line += ",\"reward\":" + fmt17(tr.reward);
            line += ",\"next_obs\":";
            append_vec(line, tr.next_obs);
            line += ",\"policy_tag\":\"" + tr.policy_tag + "\"";
            line += ",\"mode_tag\":";
            line += tr.mode_tag ? ("\"" + *tr.mode_tag + "\"") : "null";
            line += ",\"done\":";
            line += tr.done ? "true" : "false";
            line += "}\n";
            out << line;
        }
    }
    if (!out) throw Error(ErrorCategory::missing_file, "write failed: " + path);
}

std::vector<Trajectory> load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::missing_file, "cannot open: " + path);

    std::vector<Trajectory> out;
    std::string line;
    int line_no = 0;
    int current_episode = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse_error,
                        "bad dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            Transition tr;
            tr.episode_id = j.at("episode_id").get<int>();
            tr.t = j.at("t").get<int>();
            const auto to_vec = [](const nlohmann::json& arr) {
                Vec v(arr.size());
                for (size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
                return v;
            };
            tr.obs = to_vec(j.at("obs"));
            tr.action = to_vec(j.at("action"));
            tr.reward = j.at("reward").get<double>();
            tr.next_obs = to_vec(j.at("next_obs"));
            tr.policy_tag = j.at("policy_tag").get<std::string>();
            if (!j.at("mode_tag").is_null()) tr.mode_tag = j.at("mode_tag").get<std::string>();
            tr.done = j.at("done").get<bool>();

            if (tr.episode_id != current_episode) {
                out.emplace_back();
                current_episode = tr.episode_id;
            }
            out.back().push_back(std::move(tr));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse_error,
                        "missing field on dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace aoc::env
