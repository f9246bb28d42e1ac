// Command-line entry point: data generation, corpus building, training,
// rollouts, OOD runs and experiment recipes.

#include "aoc/belief/model.hpp"
#include "aoc/corpus/corpus.hpp"
#include "aoc/ctrl/baselines.hpp"
#include "aoc/ctrl/envs.hpp"
#include "aoc/env/dataset.hpp"
#include "aoc/experiments/experiments.hpp"
#include "aoc/sbi/sbi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace aoc;

constexpr const char* kToolVersion = "aoc 0.1.0";

// ------------------------------------------------------------ run manifest

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    uint64_t h = 1469598103934665603ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Written before the command body runs and finalized afterwards, so an
// artifact can always be traced back to the exact invocation that made it.
class Manifest {
public:
    Manifest(std::string path, int argc, char** argv) : path_(std::move(path)) {
        j_["tool_version"] = kToolVersion;
        nlohmann::json args = nlohmann::json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        j_["command_line"] = args;
        j_["started_at"] = iso_now();
        j_["status"] = "running";
        write();
    }

    void input(const std::string& name, const std::string& file) {
        j_["inputs"][name] = {{"path", file}, {"fnv1a", fnv1a_file(file)}};
    }
    void config(const nlohmann::json& snapshot) { j_["config"] = snapshot; }

    void finalize(const std::vector<std::pair<std::string, std::string>>& outputs) {
        for (const auto& [name, file] : outputs) {
            j_["outputs"][name] = {{"path", file}, {"fnv1a", fnv1a_file(file)}};
        }
        j_["finished_at"] = iso_now();
        j_["status"] = "ok";
        write();
    }

private:
    void write() const {
        std::ofstream out(path_);
        out << j_.dump(2) << "\n";
    }
    std::string path_;
    nlohmann::json j_;
};

// JSON config file merged under explicit flags: any key not already present
// on the command line is appended as --key value before parsing.
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw Error(ErrorCategory::missing_file, "config file not found: " + config_path);
    nlohmann::json cfg;
    try {
        in >> cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::parse_error, std::string("bad config json: ") + e.what());
    }
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
        args.push_back(flag);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    return args;
}

env::EnvConfig env_by_name(const std::string& name) {
    if (name == "pendulum-het") return env::make_pendulum_config();
    if (name == "maze") return env::make_maze_config();
    if (name == "two-gates") return env::make_two_gates_config();
    throw Error(ErrorCategory::invalid_argument, "unknown env: " + name);
}

// ------------------------------------------------------------- subcommands

struct GenDataArgs {
    std::string env = "pendulum-het";
    int n = 20000;
    uint64_t seed = 1;
    std::string out = "data.jsonl";
    int trajectories = 250;
    int data_horizon = 30;
};

void cmd_gen_data(const GenDataArgs& a, int argc, char** argv) {
    Manifest manifest(a.out + ".manifest.json", argc, argv);
    std::vector<env::Trajectory> trajs;
    if (a.env == "clinic") {
        env::PolicySpec spec;
        spec.kind = env::PolicySpec::Kind::Clinic;
        trajs = env::generate_clinic_dataset(spec, a.seed);
    } else {
        env::EnvConfig cfg = env_by_name(a.env);
        env::PolicySpec spec;
        if (a.env == "maze") spec.kind = env::PolicySpec::Kind::MazeExperts;
        if (a.env == "two-gates") spec.kind = env::PolicySpec::Kind::TwoGates;
        spec.trajectories_per_policy = a.trajectories;
        spec.data_horizon = a.data_horizon;
        trajs = env::generate_dataset(cfg, spec, a.n, a.seed);
    }
    env::save_dataset_jsonl(trajs, a.out);
    std::cout << "wrote " << env::count_transitions(trajs) << " transitions in " << trajs.size()
              << " episodes to " << a.out << "\n";
    manifest.finalize({{"dataset", a.out}});
}

struct BuildCorpusArgs {
    std::string data;
    double gamma = 0.99;
    int M = 4;
    std::string out = "corpus.aoc";
    std::string resample;  // tag:rate
    uint64_t resample_seed = 0;
    bool strip = false;
};

void cmd_build_corpus(const BuildCorpusArgs& a, int argc, char** argv) {
    Manifest manifest(a.out + ".manifest.json", argc, argv);
    manifest.input("dataset", a.data);
    const auto trajs = env::load_dataset_jsonl(a.data);
    corpus::DecisionCorpus c = corpus::build_corpus(trajs, a.gamma, a.M);
    if (!a.resample.empty()) {
        const auto colon = a.resample.find(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCategory::invalid_argument, "--resample expects tag:rate");
        }
        Rng rng(a.resample_seed);
        c = corpus::resample(c, a.resample.substr(0, colon),
                             std::stod(a.resample.substr(colon + 1)), rng);
    }
    if (a.strip) c = corpus::strip_rewards(c);
    corpus::save_corpus(c, a.out);
    std::cout << "wrote corpus with " << c.size() << " entries to " << a.out << "\n";
    manifest.finalize({{"corpus", a.out}});
}

struct TrainArgs {
    std::string corpus;
    std::string out = "model.aoc";
    int dim = 8;
    int hidden = 128;
    int epochs = 4000;
    int batch = 500;
    double lr = 1e-3;
    uint64_t seed = 0;
};

void cmd_train(const TrainArgs& a, bool sbi_mode, int argc, char** argv) {
    Manifest manifest(a.out + ".manifest.json", argc, argv);
    manifest.input("corpus", a.corpus);
    corpus::DecisionCorpus c = corpus::load_corpus(a.corpus);

    nn::TrainSettings tc;
    tc.hidden = a.hidden;
    tc.d_b = a.dim;
    tc.batch = a.batch;
    tc.epochs = a.epochs;
    tc.lr = a.lr;
    tc.seed = a.seed;

    if (sbi_mode) {
        if (!c.schema.reward_free) c = corpus::strip_rewards(c);
        const sbi::SbiModel model = sbi::train_sbi(c, tc);
        model.save(a.out);
        std::cout << "trained sbi model, final action mse " << fmt17(model.meta.final_loss)
                  << ", saved to " << a.out << "\n";
    } else {
        const belief::BeliefModel model = belief::train(c, tc);
        model.save(a.out);
        std::cout << "trained belief model, final value mse " << fmt17(model.meta.final_loss)
                  << ", saved to " << a.out << "\n";
    }
    manifest.finalize({{"model", a.out}});
}

struct RolloutArgs {
    std::string model;
    std::string corpus;
    std::string env = "pendulum-het";
    std::string policy = "aoc";
    int K = 100;
    double epsilon = 0.5;
    int k_search = -1;
    int knn_k = 5;
    int seeds = 8;
    int episodes = 1;
    std::string out = "rollout_out";
};

void write_provenance_log(const std::string& path, const std::vector<ctrl::DecisionRecord>& records) {
    std::ofstream out(path);
    std::string line;
    for (const ctrl::DecisionRecord& r : records) {
        line.clear();
        line += "{\"t\":" + std::to_string(r.t);
        line += ",\"action\":[";
        for (int i = 0; i < r.action.size(); ++i) {
            if (i) line += ',';
            line += fmt17(r.action(i));
        }
        line += "],\"value\":" + fmt17(r.value);
        line += ",\"residual\":" + fmt17(r.decomposition.residual);
        line += ",\"support\":[";
        for (size_t i = 0; i < r.decomposition.support.size(); ++i) {
            if (i) line += ',';
            line += std::to_string(r.decomposition.support[i]);
        }
        line += "],\"weights\":[";
        for (int i = 0; i < r.decomposition.weights.size(); ++i) {
            if (i) line += ',';
            line += fmt17(r.decomposition.weights(i));
        }
        line += "],\"effective_action_size\":" + std::to_string(r.effective_action_size);
        line += ",\"head_consistency_gap\":" + fmt17(r.head_consistency_gap);
        line += ",\"mode\":\"";
        line += (r.decomposition.mode == hull::HullMode::Enumeration ? "enumeration" : "heuristic");
        line += "\"}\n";
        out << line;
    }
}

void cmd_rollout(const RolloutArgs& a, int argc, char** argv) {
    std::filesystem::create_directories(a.out);
    Manifest manifest(a.out + "/manifest.json", argc, argv);
    manifest.input("model", a.model);
    manifest.input("corpus", a.corpus);

    const corpus::DecisionCorpus c = corpus::load_corpus(a.corpus);
    const belief::BeliefModel model = belief::BeliefModel::load(a.model);
    const hull::BeliefCache cache = hull::BeliefCache::from_corpus(model, c);
    const ctrl::RawCache raw(c);
    const ctrl::BcLinear bc = (a.policy == "bc") ? ctrl::bc_linear(c) : ctrl::BcLinear{};

    env::EnvConfig cfg = env_by_name(a.env);
    if (a.env == "pendulum-het") cfg.start = env::StartDistribution::NearUpright;

    experiments::Csv summary;
    summary.header = {"seed", "score", "mean_residual", "mean_effective_action_size"};
    for (int s = 0; s < a.seeds; ++s) {
        std::vector<double> scores, residuals, effective;
        for (int e = 0; e < a.episodes; ++e) {
            std::unique_ptr<ctrl::RolloutEnv> env_ptr;
            if (a.env == "pendulum-het") {
                env_ptr = std::make_unique<ctrl::PendulumRolloutEnv>(
                    cfg, e % 2 == 0 ? ctrl::PendulumModePolicy::FixedNormal
                                    : ctrl::PendulumModePolicy::FixedConverse);
            } else {
                env_ptr = std::make_unique<ctrl::MazeRolloutEnv>(cfg);
            }

            ctrl::ControllerConfig cc;
            cc.K = a.K;
            cc.epsilon = a.epsilon;
            cc.k_search = a.k_search;
            cc.gamma = c.schema.gamma;
            cc.action_low = env_ptr->action_low();
            cc.action_high = env_ptr->action_high();

            std::unique_ptr<ctrl::Policy> policy;
            if (a.policy == "aoc") policy = std::make_unique<ctrl::AocPolicy>(model, cache, cc);
            else if (a.policy == "knn") policy = std::make_unique<ctrl::KnnPolicy>(raw, a.knn_k);
            else if (a.policy == "1nn") policy = std::make_unique<ctrl::KnnPolicy>(raw, 1);
            else if (a.policy == "bc") policy = std::make_unique<ctrl::BcPolicy>(bc);
            else throw Error(ErrorCategory::invalid_argument, "unknown policy: " + a.policy);

            Rng rng(Rng::derive(static_cast<uint64_t>(s), 0xE000 + static_cast<uint64_t>(e)));
            const ctrl::RolloutResult res = ctrl::rollout(*env_ptr, *policy, cfg.horizon, rng);
            scores.push_back(res.score);
            for (const ctrl::DecisionRecord& r : res.records) {
                if (r.candidates.empty()) continue;
                residuals.push_back(r.decomposition.residual);
                effective.push_back(static_cast<double>(r.effective_action_size));
            }
            if (a.policy == "aoc") {
                write_provenance_log(a.out + "/decisions_seed" + std::to_string(s) + "_ep" +
                                         std::to_string(e) + ".jsonl",
                                     res.records);
            }
        }
        summary.add_row({std::to_string(s), experiments::fmt6(experiments::mean_of(scores)),
                         experiments::fmt6(experiments::mean_of(residuals)),
                         experiments::fmt6(experiments::mean_of(effective))});
    }
    summary.save(a.out + "/summary.csv");
    std::cout << "rollout summary written to " << a.out << "/summary.csv\n";
    manifest.finalize({{"summary", a.out + "/summary.csv"}});
}

struct OodArgs {
    std::string model;
    std::string corpus;
    int inject_at = 100;
    double noise_sigma = 1.0;
    int runs = 10;
    std::string out = "ood_out";
};

void cmd_ood_run(const OodArgs& a, int argc, char** argv) {
    std::filesystem::create_directories(a.out);
    Manifest manifest(a.out + "/manifest.json", argc, argv);
    manifest.input("model", a.model);
    manifest.input("corpus", a.corpus);

    const corpus::DecisionCorpus c = corpus::load_corpus(a.corpus);
    const belief::BeliefModel model = belief::BeliefModel::load(a.model);
    const hull::BeliefCache cache = hull::BeliefCache::from_corpus(model, c);

    env::EnvConfig cfg = env::make_pendulum_config();
    cfg.start = env::StartDistribution::NearUpright;

    ctrl::ControllerConfig cc;
    cc.action_low = Vec::Constant(1, -cfg.torque_limit);
    cc.action_high = Vec::Constant(1, cfg.torque_limit);
    cc.gamma = c.schema.gamma;

    experiments::Csv results;
    results.header = {"run", "pre_flag_rate", "post_flag_rate"};
    for (int run = 0; run < a.runs; ++run) {
        ctrl::PendulumRolloutEnv env(cfg, run % 2 == 0 ? ctrl::PendulumModePolicy::FixedNormal
                                                       : ctrl::PendulumModePolicy::FixedConverse);
        Rng rng(Rng::derive(static_cast<uint64_t>(run), 0xBAD0));
        const ctrl::OodRun r = ctrl::ood_rollout(env, model, cache, cc, a.inject_at, a.noise_sigma, rng);
        const auto flags = ctrl::ood_detect(r.residual_trace, 30, a.inject_at);
        long pre = 0, post = 0, pre_n = 0, post_n = 0;
        for (size_t t = 0; t < flags.size(); ++t) {
            if (static_cast<int>(t) < a.inject_at) {
                pre += flags[t];
                ++pre_n;
            } else {
                post += flags[t];
                ++post_n;
            }
        }
        results.add_row({std::to_string(run),
                         experiments::fmt6(static_cast<double>(pre) / std::max(1L, pre_n)),
                         experiments::fmt6(static_cast<double>(post) / std::max(1L, post_n))});
    }
    results.save(a.out + "/results.csv");
    std::cout << "ood results written to " << a.out << "/results.csv\n";
    manifest.finalize({{"results", a.out + "/results.csv"}});
}

struct EvalAbcArgs {
    std::string model;
    std::string corpus;
    double holdout = 0.0909;
    std::string out;
};

void cmd_eval_abc(const EvalAbcArgs& a, int argc, char** argv) {
    corpus::DecisionCorpus full = corpus::load_corpus(a.corpus);
    if (!full.schema.reward_free) full = corpus::strip_rewards(full);
    const sbi::SbiModel model = sbi::SbiModel::load(a.model);

    // Split whole episodes, every round(1/holdout)-th goes to the test set.
    const int stride = std::max(2, static_cast<int>(std::lround(1.0 / a.holdout)) + 1);
    corpus::DecisionCorpus train, test;
    train.schema = test.schema = full.schema;
    std::vector<int> episode_order;
    for (const corpus::CorpusEntry& e : full.entries) {
        if (episode_order.empty() || episode_order.back() != e.episode_id) {
            episode_order.push_back(e.episode_id);
        }
    }
    std::map<int, int> episode_rank;
    for (size_t i = 0; i < episode_order.size(); ++i) episode_rank[episode_order[i]] = static_cast<int>(i);
    for (const corpus::CorpusEntry& e : full.entries) {
        corpus::DecisionCorpus& dst =
            (episode_rank[e.episode_id] % stride == stride - 1) ? test : train;
        corpus::CorpusEntry copy = e;
        copy.id = dst.size();
        dst.entries.push_back(std::move(copy));
    }
    if (train.size() == 0 || test.size() == 0) {
        throw Error(ErrorCategory::invalid_argument, "eval-abc: split produced an empty side");
    }

    const hull::BeliefCache cache = sbi::build_sbi_cache(model, train);
    long agree = 0;
    double mse = 0.0;
    for (const corpus::CorpusEntry& e : test.entries) {
        const Vec b = model.net.embed(corpus::flatten_entry(test.schema, e.obs, Vec(), e.history));
        hull::HullDecomposition dec = hull::minimal_hull(cache, b, model.net.d_b, -1);
        Vec action = Vec::Zero(test.schema.d_a);
        for (size_t i = 0; i < dec.support.size(); ++i) {
            action += dec.weights(static_cast<int>(i)) * cache.actions().row(dec.support[i]).transpose();
        }
        mse += (action - e.action).squaredNorm();
        agree += (sbi::decode_discrete(action) == sbi::decode_discrete(e.action)) ? 1 : 0;
    }
    mse /= static_cast<double>(test.size());
    const double agreement = static_cast<double>(agree) / static_cast<double>(test.size());
    std::cout << "holdout episodes: " << test.size() << " steps, agreement " << fmt17(agreement)
              << ", action mse " << fmt17(mse) << "\n";

    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        Manifest manifest(a.out + "/manifest.json", argc, argv);
        manifest.input("model", a.model);
        manifest.input("corpus", a.corpus);
        experiments::Csv csv;
        csv.header = {"holdout_steps", "agreement", "action_mse"};
        csv.add_row({std::to_string(test.size()), experiments::fmt6(agreement),
                     experiments::fmt6(mse)});
        csv.save(a.out + "/results.csv");
        manifest.finalize({{"results", a.out + "/results.csv"}});
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accountable offline control toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // top-level flags may follow the subcommand name
    std::string config_path;
    app.add_option("--config", config_path, "JSON config merged under explicit flags");

    GenDataArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate an offline dataset");
    gen_cmd->add_option("--env", gen.env, "pendulum-het|maze|two-gates|clinic");
    gen_cmd->add_option("--n", gen.n, "minimum transition count (pendulum)");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--out", gen.out);
    gen_cmd->add_option("--trajectories", gen.trajectories, "per behavior policy (maze)");
    gen_cmd->add_option("--data-horizon", gen.data_horizon, "maze data episode length");

    BuildCorpusArgs bc;
    CLI::App* bc_cmd = app.add_subcommand("build-corpus", "Build a decision corpus from a dataset");
    bc_cmd->add_option("--data", bc.data)->required();
    bc_cmd->add_option("--gamma", bc.gamma);
    bc_cmd->add_option("--M", bc.M, "history window length");
    bc_cmd->add_option("--out", bc.out);
    bc_cmd->add_option("--resample", bc.resample, "tag:rate whole-trajectory resampling");
    bc_cmd->add_option("--resample-seed", bc.resample_seed);
    bc_cmd->add_flag("--strip-rewards", bc.strip, "emit a reward-free corpus");

    TrainArgs tr;
    CLI::App* train_cmd = app.add_subcommand("train-belief", "Train the belief/value model");
    train_cmd->add_option("--corpus", tr.corpus)->required();
    train_cmd->add_option("--out", tr.out);
    train_cmd->add_option("--dim", tr.dim, "belief dimension d_b");
    train_cmd->add_option("--hidden", tr.hidden);
    train_cmd->add_option("--epochs", tr.epochs);
    train_cmd->add_option("--batch", tr.batch);
    train_cmd->add_option("--lr", tr.lr);
    train_cmd->add_option("--seed", tr.seed);

    TrainArgs ta = tr;
    CLI::App* abc_cmd = app.add_subcommand("train-abc", "Train the strictly-batch imitation model");
    abc_cmd->add_option("--corpus", ta.corpus)->required();
    abc_cmd->add_option("--out", ta.out);
    abc_cmd->add_option("--dim", ta.dim);
    abc_cmd->add_option("--hidden", ta.hidden);
    abc_cmd->add_option("--epochs", ta.epochs);
    abc_cmd->add_option("--batch", ta.batch);
    abc_cmd->add_option("--lr", ta.lr);
    abc_cmd->add_option("--seed", ta.seed);

    RolloutArgs ro;
    CLI::App* roll_cmd = app.add_subcommand("rollout", "Run control-time rollouts");
    roll_cmd->add_option("--model", ro.model)->required();
    roll_cmd->add_option("--corpus", ro.corpus)->required();
    roll_cmd->add_option("--env", ro.env);
    roll_cmd->add_option("--policy", ro.policy, "aoc|knn|1nn|bc");
    roll_cmd->add_option("--K", ro.K);
    roll_cmd->add_option("--epsilon", ro.epsilon);
    roll_cmd->add_option("--k-search", ro.k_search);
    roll_cmd->add_option("--knn-k", ro.knn_k);
    roll_cmd->add_option("--seeds", ro.seeds);
    roll_cmd->add_option("--episodes", ro.episodes, "episodes per seed");
    roll_cmd->add_option("--out", ro.out);

    OodArgs ood;
    CLI::App* ood_cmd = app.add_subcommand("ood-run", "AOC rollout with injected action noise");
    ood_cmd->add_option("--model", ood.model)->required();
    ood_cmd->add_option("--corpus", ood.corpus)->required();
    ood_cmd->add_option("--inject-at", ood.inject_at);
    ood_cmd->add_option("--noise-sigma", ood.noise_sigma);
    ood_cmd->add_option("--runs", ood.runs);
    ood_cmd->add_option("--out", ood.out);

    EvalAbcArgs ea;
    CLI::App* eval_cmd = app.add_subcommand("eval-abc", "Held-out evaluation of an sbi model");
    eval_cmd->add_option("--model", ea.model)->required();
    eval_cmd->add_option("--corpus", ea.corpus)->required();
    eval_cmd->add_option("--holdout", ea.holdout, "holdout fraction (episodes)");
    eval_cmd->add_option("--out", ea.out);

    std::string exp_name, exp_out = "exp_out", exp_scale = "desk";
    CLI::App* exp_cmd = app.add_subcommand("exp", "Experiment recipes");
    CLI::App* exp_run = exp_cmd->add_subcommand("run", "Run a named experiment");
    exp_run->add_option("name", exp_name, "experiment name or 'all'")->required();
    exp_run->add_option("--out", exp_out);
    exp_run->add_option("--scale", exp_scale, "desk|paper");

    try {
        std::vector<std::string> args = merge_config_args(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (*gen_cmd) cmd_gen_data(gen, argc, argv);
        if (*bc_cmd) cmd_build_corpus(bc, argc, argv);
        if (*train_cmd) cmd_train(tr, false, argc, argv);
        if (*abc_cmd) cmd_train(ta, true, argc, argv);
        if (*roll_cmd) cmd_rollout(ro, argc, argv);
        if (*ood_cmd) cmd_ood_run(ood, argc, argv);
        if (*eval_cmd) cmd_eval_abc(ea, argc, argv);
        if (*exp_run) {
            std::vector<std::string> names;
            if (exp_name == "all") names = experiments::experiment_names();
            else names.push_back(exp_name);
            bool all_pass = true;
            for (const std::string& name : names) {
                const std::string dir = exp_out + "/" + name;
                experiments::ensure_dir(dir);
                Manifest manifest(dir + "/manifest.json", argc, argv);
                experiments::ExperimentSpec spec =
                    experiments::make_spec(name, dir, exp_scale != "paper");
                const experiments::Verdicts v = experiments::run_experiment(name, spec);
                manifest.finalize({{"verdicts", dir + "/verdicts.json"},
                                   {"results", dir + "/results.csv"}});
                std::cout << name << ": " << (v.all_pass() ? "PASS" : "FAIL") << "\n";
                all_pass = all_pass && v.all_pass();
            }
            return all_pass ? 0 : 1;
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.category_name() << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return static_cast<int>(ErrorCategory::internal);
    }
}
