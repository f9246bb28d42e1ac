#include "aoc/experiments/experiments.hpp"

#include "aoc/belief/model.hpp"
#include "aoc/corpus/corpus.hpp"
#include "aoc/ctrl/baselines.hpp"
#include "aoc/ctrl/envs.hpp"
#include "aoc/env/dataset.hpp"
#include "aoc/hull/kdtree.hpp"
#include "aoc/sbi/sbi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace aoc::experiments {

ExperimentSpec make_spec(const std::string& name, const std::string& out_dir, bool desk_scale) {
    ExperimentSpec spec;
    spec.name = name;
    spec.out_dir = out_dir;
    spec.desk_scale = desk_scale;
    if (!desk_scale) {
        for (int& n : spec.dataset_sizes) n *= 10;
        spec.d_b = 8;
        spec.hidden = 128;
    }
    return spec;
}

namespace {

constexpr uint64_t kDataStream = 0xDA7A;
constexpr uint64_t kTrainStream = 0x7124;
constexpr uint64_t kEvalStream = 0xE000;
constexpr uint64_t kResampleStream = 0x5E00;
constexpr uint64_t kOodStream = 0xBAD0;

int auto_epochs(const ExperimentSpec& spec, int corpus_size) {
    if (spec.train_epochs > 0) return spec.train_epochs;
    const int steps_per_epoch = (corpus_size + spec.batch - 1) / spec.batch;
    return std::clamp(4000 / steps_per_epoch, 20, 400);
}

belief::TrainConfig train_cfg(const ExperimentSpec& spec, int corpus_size, uint64_t seed) {
    belief::TrainConfig tc;
    tc.hidden = spec.hidden;
    tc.d_b = spec.d_b;
    tc.batch = spec.batch;
    tc.lr = spec.lr;
    tc.epochs = auto_epochs(spec, corpus_size);
    tc.seed = Rng::derive(seed, kTrainStream);
    return tc;
}

ctrl::ControllerConfig controller_cfg(const ExperimentSpec& spec, const Vec& lo, const Vec& hi,
                                      double gamma) {
    ctrl::ControllerConfig cc;
    cc.K = spec.K;
    cc.epsilon = spec.epsilon;
    cc.gamma = gamma;
    cc.action_low = lo;
    cc.action_high = hi;
    return cc;
}

// ---------------------------------------------------------------- pendulum

struct PendulumSetup {
    corpus::DecisionCorpus corpus;
    belief::BeliefModel model;
    std::optional<hull::BeliefCache> cache;
    std::optional<ctrl::RawCache> raw;
    ctrl::BcLinear bc;
    double data_avg_return = 0.0;
};

PendulumSetup pendulum_setup(const ExperimentSpec& spec, int n_transitions, uint64_t seed) {
    const env::EnvConfig cfg = env::make_pendulum_config();
    env::PolicySpec pspec;
    const auto trajs =
        env::generate_dataset(cfg, pspec, n_transitions, Rng::derive(seed, kDataStream));

    PendulumSetup s;
    s.corpus = corpus::build_corpus(trajs, spec.pendulum_gamma, 4);
    s.model = belief::train(s.corpus, train_cfg(spec, s.corpus.size(), seed));
    s.cache.emplace(hull::BeliefCache::from_corpus(s.model, s.corpus));
    s.raw.emplace(s.corpus);
    s.bc = ctrl::bc_linear(s.corpus);
    s.data_avg_return = mean_of(corpus::episode_returns(trajs));
    return s;
}

struct EvalStats {
    double score = 0.0;
    double mean_residual = 0.0;
    double mean_effective = 0.0;
};

// Mean over eval episodes; modes alternate Normal/Converse so both systems
// are always represented.
EvalStats eval_pendulum(ctrl::Policy& policy, const ExperimentSpec& spec, uint64_t seed) {
    env::EnvConfig cfg = env::make_pendulum_config();
    cfg.start = env::StartDistribution::NearUpright;
    std::vector<double> scores, residuals, effective;
    for (int e = 0; e < spec.eval_episodes; ++e) {
        ctrl::PendulumRolloutEnv env(cfg, e % 2 == 0 ? ctrl::PendulumModePolicy::FixedNormal
                                                     : ctrl::PendulumModePolicy::FixedConverse);
        Rng rng(Rng::derive(seed, kEvalStream + static_cast<uint64_t>(e)));
        const ctrl::RolloutResult res = ctrl::rollout(env, policy, cfg.horizon, rng);
        scores.push_back(res.score);
        for (const ctrl::DecisionRecord& r : res.records) {
            if (r.candidates.empty()) continue;
            residuals.push_back(r.decomposition.residual);
            effective.push_back(static_cast<double>(r.effective_action_size));
        }
    }
    return {mean_of(scores), mean_of(residuals), mean_of(effective)};
}

// ---------------------------------------------------------------- maze

struct MazeSetup {
    env::EnvConfig cfg;  // control-task config
    corpus::DecisionCorpus corpus;
    belief::BeliefModel model;
    std::optional<hull::BeliefCache> cache;
};

std::vector<env::Trajectory> maze_dataset(uint64_t seed) {
    env::PolicySpec mspec;
    mspec.kind = env::PolicySpec::Kind::MazeExperts;
    return env::generate_dataset(env::make_maze_config(), mspec, 0, Rng::derive(seed, kDataStream));
}

MazeSetup maze_setup_from(const ExperimentSpec& spec, corpus::DecisionCorpus corpus, uint64_t seed) {
    MazeSetup s;
    s.cfg = env::make_maze_config();
    s.corpus = std::move(corpus);
    s.model = belief::train(s.corpus, train_cfg(spec, s.corpus.size(), seed));
    s.cache.emplace(hull::BeliefCache::from_corpus(s.model, s.corpus));
    return s;
}

struct MazeEpisode {
    bool success = false;
    int gate = -1;  // 0 upper, 1 lower
    double score = 0.0;
    int steps = 0;
    ctrl::RolloutResult result;
};

MazeEpisode roll_maze(const MazeSetup& s, const ExperimentSpec& spec, uint64_t episode_seed) {
    ctrl::MazeRolloutEnv env(s.cfg);
    ctrl::ControllerConfig cc =
        controller_cfg(spec, Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), s.corpus.schema.gamma);
    ctrl::AocPolicy policy(s.model, *s.cache, cc);
    Rng rng(episode_seed);

    MazeEpisode ep;
    ep.result = ctrl::rollout(env, policy, s.cfg.horizon, rng);
    ep.success = env.state().goal_reached;
    ep.score = ep.result.score;
    ep.steps = static_cast<int>(ep.result.trajectory.size());
    for (const env::Transition& tr : ep.result.trajectory) {
        if (tr.obs(0) < s.cfg.wall_x && tr.next_obs(0) >= s.cfg.wall_x) {
            const double y = tr.next_obs(1);
            ep.gate = (std::abs(y - 15.0) < std::abs(y - 8.0)) ? 0 : 1;
            break;
        }
    }
    return ep;
}

std::array<double, 4> tag_mass(const ctrl::DecisionRecord& rec,
                               const std::vector<std::string>& tags) {
    std::array<double, 4> mass{0.0, 0.0, 0.0, 0.0};
    const hull::HullDecomposition& dec = rec.decomposition;
    for (size_t i = 0; i < dec.support.size(); ++i) {
        const std::string& tag = tags[static_cast<size_t>(dec.support[i])];
        const double w = dec.weights(static_cast<int>(i));
        if (tag == "pi1") mass[0] += w;
        else if (tag == "pi2") mass[1] += w;
        else if (tag == "pi3") mass[2] += w;
        else if (tag == "pi4") mass[3] += w;
    }
    return mass;
}

}  // namespace

// -------------------------------------------------------------------------

Verdicts run_pendulum_het(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const std::vector<std::string> regimes{"low", "mid", "rich"};
    const std::vector<std::string> methods{"aoc", "knn", "1nn", "bc", "data-avg"};

    Csv raw_csv;
    raw_csv.header = {"regime", "method", "seed", "score"};
    Csv summary;
    summary.header = {"regime", "method", "mean", "std"};
    Verdicts verdicts;

    for (size_t ri = 0; ri < regimes.size() && ri < spec.dataset_sizes.size(); ++ri) {
        std::map<std::string, std::vector<double>> scores;
        for (uint64_t seed : spec.seeds) {
            PendulumSetup s = pendulum_setup(spec, spec.dataset_sizes[ri], seed);
            const Vec lo = Vec::Constant(1, -2.0), hi = Vec::Constant(1, 2.0);

            ctrl::AocPolicy aoc(s.model, *s.cache, controller_cfg(spec, lo, hi, spec.pendulum_gamma));
            ctrl::KnnPolicy knn(*s.raw, spec.knn_k);
            ctrl::KnnPolicy nn1(*s.raw, 1);
            ctrl::BcPolicy bc(s.bc);

            scores["aoc"].push_back(eval_pendulum(aoc, spec, seed).score);
            scores["knn"].push_back(eval_pendulum(knn, spec, seed).score);
            scores["1nn"].push_back(eval_pendulum(nn1, spec, seed).score);
            scores["bc"].push_back(eval_pendulum(bc, spec, seed).score);
            scores["data-avg"].push_back(s.data_avg_return);

            for (const std::string& m : methods) {
                raw_csv.add_row({regimes[ri], m, std::to_string(seed), fmt6(scores[m].back())});
            }
        }
        std::vector<double> means;
        for (const std::string& m : methods) {
            summary.add_row({regimes[ri], m, fmt6(mean_of(scores[m])), fmt6(std_of(scores[m]))});
            means.push_back(mean_of(scores[m]));
        }
        svg_bar_chart(spec.out_dir + "/figures/pendulum_" + regimes[ri] + ".svg",
                      "Pendulum-Het (" + regimes[ri] + "), mean score", methods, means);

        const double aoc = mean_of(scores["aoc"]);
        const double knn = mean_of(scores["knn"]);
        const double nn1 = mean_of(scores["1nn"]);
        verdicts.set(regimes[ri] + "_aoc_beats_knn", aoc > knn);
        verdicts.set(regimes[ri] + "_aoc_beats_1nn", aoc > nn1);
        verdicts.set(regimes[ri] + "_aoc_at_least_data_avg", aoc >= mean_of(scores["data-avg"]));
        verdicts.set(regimes[ri] + "_margin_3x",
                     std::abs(knn) >= 3.0 * std::abs(aoc) && std::abs(nn1) >= 3.0 * std::abs(aoc));
        verdicts.note(regimes[ri] + "_aoc_mean", fmt6(aoc));
        verdicts.note(regimes[ri] + "_knn_mean", fmt6(knn));
        verdicts.note(regimes[ri] + "_1nn_mean", fmt6(nn1));
    }

    raw_csv.save(spec.out_dir + "/results.csv");
    summary.save(spec.out_dir + "/summary.csv");
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_quantile_sweep(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const int n = spec.dataset_sizes.size() > 1 ? spec.dataset_sizes[1] : spec.dataset_sizes.front();

    Csv raw_csv;
    raw_csv.header = {"epsilon", "seed", "score", "mean_effective_action_size"};
    std::map<double, std::vector<double>> scores;
    std::map<double, std::vector<double>> effective;

    for (uint64_t seed : spec.seeds) {
        PendulumSetup s = pendulum_setup(spec, n, seed);
        const Vec lo = Vec::Constant(1, -2.0), hi = Vec::Constant(1, 2.0);
        for (double eps : spec.epsilon_grid) {
            ExperimentSpec eps_spec = spec;
            eps_spec.epsilon = eps;
            ctrl::AocPolicy aoc(s.model, *s.cache,
                                controller_cfg(eps_spec, lo, hi, spec.pendulum_gamma));
            const EvalStats stats = eval_pendulum(aoc, spec, seed);
            scores[eps].push_back(stats.score);
            effective[eps].push_back(stats.mean_effective);
            raw_csv.add_row({fmt6(eps), std::to_string(seed), fmt6(stats.score),
                             fmt6(stats.mean_effective)});
        }
    }

    Csv summary;
    summary.header = {"epsilon", "mean", "std", "mean_effective_action_size"};
    Series series{"score", {}, {}};
    for (double eps : spec.epsilon_grid) {
        summary.add_row({fmt6(eps), fmt6(mean_of(scores[eps])), fmt6(std_of(scores[eps])),
                         fmt6(mean_of(effective[eps]))});
        series.x.push_back(eps);
        series.y.push_back(mean_of(scores[eps]));
    }

    Verdicts verdicts;
    const auto at = [&](double e) { return mean_of(scores[e]); };
    verdicts.set("score_0.5_gt_0.9", at(0.5) > at(0.9));
    verdicts.set("score_0.9_gt_1.0", at(0.9) > at(1.0));
    verdicts.set("score_0.5_ge_0.3_minus_std", at(0.5) >= at(0.3) - std_of(scores[0.3]));
    bool effective_tracks_quantile = true;
    for (double eps : spec.epsilon_grid) {
        const double expected = std::ceil(eps * spec.K);
        if (std::abs(mean_of(effective[eps]) - expected) > 1.0) effective_tracks_quantile = false;
    }
    verdicts.set("effective_action_size_tracks_quantile", effective_tracks_quantile);

    raw_csv.save(spec.out_dir + "/results.csv");
    summary.save(spec.out_dir + "/summary.csv");
    svg_line_chart(spec.out_dir + "/figures/quantile_sweep.svg", "Score vs epsilon quantile",
                   "epsilon", "mean score", {series});
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_tradeoff_k(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const int n = spec.dataset_sizes.size() > 1 ? spec.dataset_sizes[1] : spec.dataset_sizes.front();
    const std::vector<int> k_grid{1, spec.d_b + 2, 2 * (spec.d_b + 1), 10 * (spec.d_b + 1)};

    Csv raw_csv;
    raw_csv.header = {"k_search", "seed", "score"};
    std::map<int, std::vector<double>> scores;
    for (uint64_t seed : spec.seeds) {
        PendulumSetup s = pendulum_setup(spec, n, seed);
        const Vec lo = Vec::Constant(1, -2.0), hi = Vec::Constant(1, 2.0);
        for (int k : k_grid) {
            ctrl::ControllerConfig cc = controller_cfg(spec, lo, hi, spec.pendulum_gamma);
            cc.k_search = k;
            ctrl::AocPolicy aoc(s.model, *s.cache, cc);
            const double score = eval_pendulum(aoc, spec, seed).score;
            scores[k].push_back(score);
            raw_csv.add_row({std::to_string(k), std::to_string(seed), fmt6(score)});
        }
    }

    Csv summary;
    summary.header = {"k_search", "mean", "std"};
    std::vector<std::string> labels;
    std::vector<double> means;
    for (int k : k_grid) {
        summary.add_row({std::to_string(k), fmt6(mean_of(scores[k])), fmt6(std_of(scores[k]))});
        labels.push_back(std::to_string(k));
        means.push_back(mean_of(scores[k]));
    }

    const int k_ref = 2 * (spec.d_b + 1);
    const int k_big = 10 * (spec.d_b + 1);
    Verdicts verdicts;
    verdicts.set("k1_worse_10x",
                 std::abs(mean_of(scores[1])) >= 10.0 * std::abs(mean_of(scores[k_ref])));
    verdicts.set("k_big_within_1_std",
                 std::abs(mean_of(scores[k_big]) - mean_of(scores[k_ref])) <=
                     std::max(std_of(scores[k_ref]), 1e-9));
    verdicts.note("k1_mean", fmt6(mean_of(scores[1])));
    verdicts.note("k_ref_mean", fmt6(mean_of(scores[k_ref])));
    verdicts.note("k_big_mean", fmt6(mean_of(scores[k_big])));

    raw_csv.save(spec.out_dir + "/results.csv");
    summary.save(spec.out_dir + "/summary.csv");
    svg_bar_chart(spec.out_dir + "/figures/tradeoff_k.svg", "Score vs k_search", labels, means);
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_maze_accountability(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const uint64_t seed = spec.seeds.front();
    MazeSetup s = maze_setup_from(
        spec, corpus::build_corpus(maze_dataset(seed), spec.maze_gamma, 4), seed);

    const int attempts = 125;
    Csv episodes_csv;
    episodes_csv.header = {"episode", "success", "gate", "score", "steps"};

    int successes = 0;
    std::array<int, 2> gate_counts{0, 0};
    double pre_mass = 0.0, post_mass = 0.0;
    long pre_steps = 0, post_steps = 0;
    constexpr int kBins = 32;
    std::array<std::array<double, 4>, kBins> bin_mass{};
    std::array<long, kBins> bin_count{};

    for (int ep = 0; ep < attempts; ++ep) {
        const MazeEpisode e = roll_maze(s, spec, Rng::derive(seed, kEvalStream + static_cast<uint64_t>(ep)));
        episodes_csv.add_row({std::to_string(ep), e.success ? "1" : "0", std::to_string(e.gate),
                              fmt6(e.score), std::to_string(e.steps)});
        if (!e.success) continue;
        ++successes;
        if (e.gate >= 0) ++gate_counts[static_cast<size_t>(e.gate)];
        for (size_t i = 0; i < e.result.trajectory.size(); ++i) {
            const double x = e.result.trajectory[i].obs(0);
            const std::array<double, 4> mass = tag_mass(e.result.records[i], s.cache->tags());
            if (x < s.cfg.wall_x) {
                pre_mass += mass[0] + mass[1];
                ++pre_steps;
            } else if (x > s.cfg.wall_x) {
                post_mass += mass[2] + mass[3];
                ++post_steps;
            }
            const int bin = std::clamp(static_cast<int>(x / 16.0 * kBins), 0, kBins - 1);
            for (int tag = 0; tag < 4; ++tag) bin_mass[static_cast<size_t>(bin)][static_cast<size_t>(tag)] += mass[static_cast<size_t>(tag)];
            ++bin_count[static_cast<size_t>(bin)];
        }
    }
    const double success_rate = static_cast<double>(successes) / attempts;
    pre_mass = pre_steps > 0 ? pre_mass / static_cast<double>(pre_steps) : 0.0;
    post_mass = post_steps > 0 ? post_mass / static_cast<double>(post_steps) : 0.0;

    // Stacked-composition table: mean corpus-subset mass per policy vs x.
    Csv composition;
    composition.header = {"x_bin_center", "pi1", "pi2", "pi3", "pi4"};
    std::array<Series, 4> series{Series{"pi1", {}, {}}, Series{"pi2", {}, {}},
                                 Series{"pi3", {}, {}}, Series{"pi4", {}, {}}};
    for (int b = 0; b < kBins; ++b) {
        if (bin_count[static_cast<size_t>(b)] == 0) continue;
        const double x = (b + 0.5) * 16.0 / kBins;
        std::vector<std::string> row{fmt6(x)};
        for (int tag = 0; tag < 4; ++tag) {
            const double m = bin_mass[static_cast<size_t>(b)][static_cast<size_t>(tag)] /
                             static_cast<double>(bin_count[static_cast<size_t>(b)]);
            row.push_back(fmt6(m));
            series[static_cast<size_t>(tag)].x.push_back(x);
            series[static_cast<size_t>(tag)].y.push_back(m);
        }
        composition.add_row(row);
    }

    Verdicts verdicts;
    verdicts.set("pre_gate_mass_pi12_ge_0.9", pre_mass >= 0.9);
    verdicts.set("post_gate_mass_pi34_ge_0.9", post_mass >= 0.9);
    verdicts.set("success_rate_ge_0.8", success_rate >= 0.8);
    verdicts.set("at_least_100_successes", successes >= 100);
    verdicts.note("success_rate", fmt6(success_rate));
    verdicts.note("pre_gate_mass", fmt6(pre_mass));
    verdicts.note("post_gate_mass", fmt6(post_mass));
    verdicts.note("upper_gate_episodes", std::to_string(gate_counts[0]));
    verdicts.note("lower_gate_episodes", std::to_string(gate_counts[1]));

    episodes_csv.save(spec.out_dir + "/results.csv");
    composition.save(spec.out_dir + "/composition.csv");
    svg_line_chart(spec.out_dir + "/figures/composition.svg",
                   "Corpus-subset composition along x", "x position", "weight mass",
                   {series[0], series[1], series[2], series[3]});
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_adaptivity(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const uint64_t seed = spec.seeds.front();
    const corpus::DecisionCorpus base = corpus::build_corpus(maze_dataset(seed), spec.maze_gamma, 4);

    Csv results;
    results.header = {"rate", "success_rate", "upper_gate", "lower_gate"};
    std::vector<int> upper_counts;
    std::vector<double> success_rates;
    Series succ_series{"success rate", {}, {}}, upper_series{"upper gate", {}, {}},
        lower_series{"lower gate", {}, {}};

    for (size_t ri = 0; ri < spec.resample_rates.size(); ++ri) {
        const double rate = spec.resample_rates[ri];
        Rng resample_rng(Rng::derive(seed, kResampleStream + ri));
        MazeSetup s = maze_setup_from(spec, corpus::resample(base, "pi1", rate, resample_rng), seed);

        int successes = 0;
        std::array<int, 2> gates{0, 0};
        for (int ep = 0; ep < spec.maze_rollouts; ++ep) {
            const MazeEpisode e =
                roll_maze(s, spec, Rng::derive(seed, kEvalStream + static_cast<uint64_t>(ep)));
            if (!e.success) continue;
            ++successes;
            if (e.gate >= 0) ++gates[static_cast<size_t>(e.gate)];
        }
        const double success_rate = static_cast<double>(successes) / spec.maze_rollouts;
        results.add_row({fmt6(rate), fmt6(success_rate), std::to_string(gates[0]),
                         std::to_string(gates[1])});
        upper_counts.push_back(gates[0]);
        success_rates.push_back(success_rate);
        succ_series.x.push_back(rate);
        succ_series.y.push_back(success_rate * 100.0);
        upper_series.x.push_back(rate);
        upper_series.y.push_back(gates[0]);
        lower_series.x.push_back(rate);
        lower_series.y.push_back(gates[1]);
    }

    // Monotone non-increasing over decreasing rates, one adjacent inversion
    // of at most 5 episodes allowed.
    int inversions = 0;
    int worst_inversion = 0;
    for (size_t i = 1; i < upper_counts.size(); ++i) {
        const int rise = upper_counts[i] - upper_counts[i - 1];
        if (rise > 0) {
            ++inversions;
            worst_inversion = std::max(worst_inversion, rise);
        }
    }

    Verdicts verdicts;
    verdicts.set("upper_gate_monotone", inversions == 0 || (inversions == 1 && worst_inversion <= 5));
    verdicts.set("success_ge_0.8_all_rates",
                 *std::min_element(success_rates.begin(), success_rates.end()) >= 0.8);
    verdicts.note("upper_counts", [&] {
        std::string s;
        for (int c : upper_counts) s += std::to_string(c) + " ";
        return s;
    }());

    results.save(spec.out_dir + "/results.csv");
    svg_line_chart(spec.out_dir + "/figures/adaptivity.svg", "Gate usage vs resampling rate",
                   "rate", "episodes (of 100)", {upper_series, lower_series, succ_series});
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_conservation(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const uint64_t seed = spec.seeds.front();

    env::PolicySpec pspec;
    pspec.kind = env::PolicySpec::Kind::TwoGates;
    const auto trajs = env::generate_dataset(env::make_two_gates_config(), pspec, 0,
                                             Rng::derive(seed, kDataStream));
    MazeSetup s = maze_setup_from(spec, corpus::build_corpus(trajs, spec.maze_gamma, 4), seed);
    s.cfg = env::make_two_gates_config();

    // Dataset positions for the trajectory-envelope statistic.
    Mat positions(s.corpus.size(), 2);
    for (int i = 0; i < s.corpus.size(); ++i) {
        positions.row(i) = s.corpus.entries[static_cast<size_t>(i)].obs.transpose();
    }
    hull::KdTree position_tree(positions);

    Csv results;
    results.header = {"epsilon", "mean_score", "std_score", "envelope_fraction"};
    std::vector<double> env_fractions, mean_scores;
    Series score_series{"score", {}, {}}, envelope_series{"envelope", {}, {}};

    for (double eps : spec.conservation_epsilons) {
        ExperimentSpec eps_spec = spec;
        eps_spec.epsilon = eps;
        std::vector<double> scores;
        long inside = 0, total = 0;
        for (int ep = 0; ep < spec.maze_rollouts; ++ep) {
            const MazeEpisode e =
                roll_maze(s, eps_spec, Rng::derive(seed, kEvalStream + static_cast<uint64_t>(ep)));
            scores.push_back(e.score);
            for (const env::Transition& tr : e.result.trajectory) {
                const std::vector<int> nn = position_tree.knn(tr.next_obs, 1);
                const double d = (positions.row(nn[0]).transpose() - tr.next_obs).norm();
                inside += (d <= 1.0) ? 1 : 0;
                ++total;
            }
        }
        const double fraction = static_cast<double>(inside) / static_cast<double>(total);
        results.add_row({fmt6(eps), fmt6(mean_of(scores)), fmt6(std_of(scores)), fmt6(fraction)});
        env_fractions.push_back(fraction);
        mean_scores.push_back(mean_of(scores));
        score_series.x.push_back(eps);
        score_series.y.push_back(mean_of(scores));
        envelope_series.x.push_back(eps);
        envelope_series.y.push_back(fraction);
    }

    bool envelope_non_increasing = true;
    for (size_t i = 1; i < env_fractions.size(); ++i) {
        if (env_fractions[i] > env_fractions[i - 1] + 1e-12) envelope_non_increasing = false;
    }

    Verdicts verdicts;
    verdicts.set("score_0.1_gt_0.7", mean_scores.front() > mean_scores.back());
    verdicts.set("envelope_non_increasing", envelope_non_increasing);
    verdicts.note("scores", [&] {
        std::string t;
        for (double v : mean_scores) t += fmt6(v) + " ";
        return t;
    }());

    results.save(spec.out_dir + "/results.csv");
    svg_line_chart(spec.out_dir + "/figures/conservation.svg", "Two Gates: score and envelope vs epsilon",
                   "epsilon", "value", {score_series, envelope_series});
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_ood(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const uint64_t seed = spec.seeds.front();
    PendulumSetup s = pendulum_setup(spec, spec.dataset_sizes.front(), seed);

    env::EnvConfig cfg = env::make_pendulum_config();
    cfg.start = env::StartDistribution::NearUpright;
    const Vec lo = Vec::Constant(1, -2.0), hi = Vec::Constant(1, 2.0);
    const ctrl::ControllerConfig cc = controller_cfg(spec, lo, hi, spec.pendulum_gamma);

    Csv results;
    results.header = {"run", "pre_flag_rate", "post_flag_rate", "pass"};
    std::vector<Series> trace_series;
    int passes = 0;
    for (int run = 0; run < spec.ood_runs; ++run) {
        ctrl::PendulumRolloutEnv env(cfg, run % 2 == 0 ? ctrl::PendulumModePolicy::FixedNormal
                                                       : ctrl::PendulumModePolicy::FixedConverse);
        Rng rng(Rng::derive(seed, kOodStream + static_cast<uint64_t>(run)));
        const ctrl::OodRun r =
            ctrl::ood_rollout(env, s.model, *s.cache, cc, spec.ood_inject_at, spec.ood_noise_sigma, rng);
        const std::vector<bool> flags = ctrl::ood_detect(r.residual_trace, 30, spec.ood_inject_at);

        long pre_flagged = 0, post_flagged = 0, pre_n = 0, post_n = 0;
        for (size_t t = 0; t < flags.size(); ++t) {
            if (static_cast<int>(t) < spec.ood_inject_at) {
                pre_flagged += flags[t] ? 1 : 0;
                ++pre_n;
            } else {
                post_flagged += flags[t] ? 1 : 0;
                ++post_n;
            }
        }
        const double pre_rate = static_cast<double>(pre_flagged) / static_cast<double>(pre_n);
        const double post_rate = static_cast<double>(post_flagged) / static_cast<double>(post_n);
        const bool pass = post_rate >= 0.8 && pre_rate <= 0.05;
        passes += pass ? 1 : 0;
        results.add_row({std::to_string(run), fmt6(pre_rate), fmt6(post_rate), pass ? "1" : "0"});

        if (run < 3) {
            Series tr{"run " + std::to_string(run), {}, {}};
            for (size_t t = 0; t < r.residual_trace.size(); ++t) {
                tr.x.push_back(static_cast<double>(t));
                tr.y.push_back(r.residual_trace[t]);
            }
            trace_series.push_back(std::move(tr));
        }
    }

    Verdicts verdicts;
    verdicts.set("ood_pass_in_9_of_10", passes >= 9);
    verdicts.note("passes", std::to_string(passes) + "/" + std::to_string(spec.ood_runs));

    results.save(spec.out_dir + "/results.csv");
    svg_line_chart(spec.out_dir + "/figures/ood_residuals.svg",
                   "Corpus residual trace (noise injected at t=" +
                       std::to_string(spec.ood_inject_at) + ")",
                   "t", "residual", trace_series);
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_abc_imitation(const ExperimentSpec& spec) {
    ensure_dir(spec.out_dir + "/figures");
    const uint64_t seed = spec.seeds.front();

    env::PolicySpec cspec;
    cspec.kind = env::PolicySpec::Kind::Clinic;
    const auto trajs = env::generate_clinic_dataset(cspec, Rng::derive(seed, kDataStream));

    // 10:1 split by episode.
    std::vector<env::Trajectory> train_trajs, test_trajs;
    for (size_t i = 0; i < trajs.size(); ++i) {
        if (i % 11 == 10) test_trajs.push_back(trajs[i]);
        else train_trajs.push_back(trajs[i]);
    }

    const corpus::DecisionCorpus train_corpus =
        corpus::strip_rewards(corpus::build_corpus(train_trajs, 0.99, 4));
    sbi::TrainConfig tc;
    tc.hidden = spec.hidden;
    tc.d_b = spec.d_b;
    tc.batch = spec.batch;
    tc.lr = spec.lr;
    tc.epochs = auto_epochs(spec, train_corpus.size());
    tc.seed = Rng::derive(seed, kTrainStream);
    const sbi::SbiModel model = sbi::train_sbi(train_corpus, tc);
    const hull::BeliefCache cache = sbi::build_sbi_cache(model, train_corpus);
    const ctrl::BcLinear bc = ctrl::bc_linear(train_corpus);

    long agree_abc = 0, agree_bc = 0, agree_rule = 0, total = 0;
    for (const env::Trajectory& traj : test_trajs) {
        env::Trajectory prefix;
        for (const env::Transition& tr : traj) {
            const int logged = tr.action(0) > tr.action(1) ? 0 : 1;
            const int regime = (tr.policy_tag == "regime1") ? 1 : 0;
            const int rule = (tr.obs(0) < 0.5) ? (regime == 0 ? 1 : 0) : (regime == 0 ? 0 : 1);

            const sbi::AbcDecision abc = sbi::abc_act(model, cache, tr.obs, prefix);
            const int abc_action = sbi::decode_discrete(abc.action);

            const corpus::HistoryWindow h = corpus::history_at(
                prefix, static_cast<int>(prefix.size()), train_corpus.schema);
            const int bc_action = sbi::decode_discrete(ctrl::bc_act(bc, tr.obs, h));

            agree_abc += (abc_action == logged) ? 1 : 0;
            agree_bc += (bc_action == logged) ? 1 : 0;
            agree_rule += (rule == logged) ? 1 : 0;
            ++total;
            prefix.push_back(tr);
        }
    }
    const double abc_rate = static_cast<double>(agree_abc) / static_cast<double>(total);
    const double bc_rate = static_cast<double>(agree_bc) / static_cast<double>(total);
    const double ceiling = static_cast<double>(agree_rule) / static_cast<double>(total);

    Csv results;
    results.header = {"method", "holdout_agreement"};
    results.add_row({"abc", fmt6(abc_rate)});
    results.add_row({"bc-lr", fmt6(bc_rate)});
    results.add_row({"expert-ceiling", fmt6(ceiling)});

    Verdicts verdicts;
    verdicts.set("abc_ge_bclr", abc_rate >= bc_rate);
    verdicts.set("abc_within_3pts_of_ceiling", abc_rate >= ceiling - 0.03);
    verdicts.note("abc", fmt6(abc_rate));
    verdicts.note("bc_lr", fmt6(bc_rate));
    verdicts.note("ceiling", fmt6(ceiling));

    results.save(spec.out_dir + "/results.csv");
    svg_bar_chart(spec.out_dir + "/figures/abc_agreement.svg", "Held-out action agreement",
                  {"abc", "bc-lr", "ceiling"}, {abc_rate, bc_rate, ceiling});
    verdicts.save(spec.out_dir + "/verdicts.json");
    return verdicts;
}

Verdicts run_experiment(const std::string& name, const ExperimentSpec& spec) {
    if (name == "pendulum-het") return run_pendulum_het(spec);
    if (name == "quantile-sweep") return run_quantile_sweep(spec);
    if (name == "maze-accountability") return run_maze_accountability(spec);
    if (name == "adaptivity") return run_adaptivity(spec);
    if (name == "conservation") return run_conservation(spec);
    if (name == "tradeoff-k") return run_tradeoff_k(spec);
    if (name == "ood") return run_ood(spec);
    if (name == "abc-imitation") return run_abc_imitation(spec);
    throw Error(ErrorCategory::invalid_argument, "unknown experiment: " + name);
}

std::vector<std::string> experiment_names() {
    return {"pendulum-het", "quantile-sweep", "maze-accountability", "adaptivity",
            "conservation",  "tradeoff-k",    "ood",                 "abc-imitation"};
}

}  // namespace aoc::experiments
