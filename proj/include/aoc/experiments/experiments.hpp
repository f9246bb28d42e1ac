#pragma once

#include "aoc/experiments/report.hpp"
#include "aoc/env/dataset.hpp"

#include <string>
#include <vector>

namespace aoc::experiments {

struct ExperimentSpec {
    std::string name;
    std::string out_dir;
    bool desk_scale = true;  // paper scale multiplies dataset sizes by 10

    std::vector<int> dataset_sizes{10000, 30000, 60000};  // low / mid / rich
    std::vector<double> epsilon_grid{0.3, 0.5, 0.9, 1.0};
    std::vector<double> conservation_epsilons{0.1, 0.3, 0.5, 0.7};
    std::vector<double> resample_rates{4.0, 3.0, 2.0, 1.0, 0.75, 0.5, 0.25};
    std::vector<uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};

    // Controller.
    int K = 100;
    double epsilon = 0.5;
    int knn_k = 5;

    // Belief training (desk scale).
    int d_b = 4;
    int hidden = 64;
    int batch = 500;
    double lr = 1e-3;
    int train_epochs = 0;  // 0: sized so every model sees ~4000 adam steps

    double pendulum_gamma = 0.99;
    double maze_gamma = 0.99;
    int eval_episodes = 4;
    int maze_rollouts = 100;

    // OOD run.
    int ood_runs = 10;
    int ood_inject_at = 100;
    double ood_noise_sigma = 1.0;
};

ExperimentSpec make_spec(const std::string& name, const std::string& out_dir, bool desk_scale = true);

// Each recipe writes results.csv, verdicts.json and figures/*.svg into
// spec.out_dir and returns the verdicts.
Verdicts run_pendulum_het(const ExperimentSpec& spec);
Verdicts run_quantile_sweep(const ExperimentSpec& spec);
Verdicts run_maze_accountability(const ExperimentSpec& spec);
Verdicts run_adaptivity(const ExperimentSpec& spec);
Verdicts run_conservation(const ExperimentSpec& spec);
Verdicts run_tradeoff_k(const ExperimentSpec& spec);
Verdicts run_ood(const ExperimentSpec& spec);
Verdicts run_abc_imitation(const ExperimentSpec& spec);

// Dispatch by name ("pendulum-het", "quantile-sweep", "maze-accountability",
// "adaptivity", "conservation", "tradeoff-k", "ood", "abc-imitation").
Verdicts run_experiment(const std::string& name, const ExperimentSpec& spec);
std::vector<std::string> experiment_names();

}  // namespace aoc::experiments
