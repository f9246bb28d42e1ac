#pragma once

#include "aoc/belief/model.hpp"
#include "aoc/hull/minimal_hull.hpp"
#include "aoc/rng.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aoc::ctrl {

struct ControllerConfig {
    int K = 100;              // candidate actions per step
    double epsilon = 0.5;     // residual quantile kept before the arg-max
    double gamma = 0.99;
    uint64_t seed = 0;
    int k_search = -1;        // -1: hull default 2(d_b+1)
    Vec action_low, action_high;
};

struct CandidateSummary {
    Vec action;
    double residual = 0.0;
    double value = 0.0;
    bool filtered = false;
};

struct DecisionRecord {
    int t = 0;
    Vec action;
    double value = 0.0;
    hull::HullDecomposition decomposition;
    std::vector<CandidateSummary> candidates;
    int effective_action_size = 0;
    // |sum w l(b^c) - l(b_t)|: how far the decomposition identity is from
    // exact given the head's fit of corpus values.
    double head_consistency_gap = 0.0;
};

double estimate_value(const hull::HullDecomposition& decomposition, const hull::BeliefCache& cache);

// One step of the controller: sample K candidate actions uniformly, decompose
// each candidate's belief over a minimal corpus hull, drop candidates whose
// residual exceeds the epsilon-quantile of the K residuals (the lowest-
// residual candidate always survives), return the surviving candidate with
// the highest decomposed value (ties to the lower candidate index).
DecisionRecord select_action(const belief::BeliefModel& model, const hull::BeliefCache& cache,
                             const Vec& obs, const env::Trajectory& so_far,
                             const ControllerConfig& cfg, Rng& rng);

// Environment handle for control-time rollouts.
class RolloutEnv {
public:
    virtual ~RolloutEnv() = default;
    virtual int obs_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual Vec action_low() const = 0;
    virtual Vec action_high() const = 0;
    virtual int horizon() const = 0;
    virtual Vec reset(Rng& rng) = 0;
    struct Step {
        Vec obs;
        double reward = 0.0;
        bool done = false;
    };
    virtual Step step(const Vec& action) = 0;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual Vec act(const Vec& obs, const env::Trajectory& so_far, Rng& rng,
                    DecisionRecord* record) = 0;
};

struct RolloutResult {
    env::Trajectory trajectory;
    std::vector<DecisionRecord> records;
    double score = 0.0;  // undiscounted episode sum
};

RolloutResult rollout(RolloutEnv& env, Policy& policy, int horizon, Rng& rng);

class AocPolicy : public Policy {
public:
    AocPolicy(const belief::BeliefModel& model, const hull::BeliefCache& cache, ControllerConfig cfg)
        : model_(model), cache_(cache), cfg_(std::move(cfg)) {}

    Vec act(const Vec& obs, const env::Trajectory& so_far, Rng& rng, DecisionRecord* record) override;

    const ControllerConfig& config() const { return cfg_; }

private:
    const belief::BeliefModel& model_;
    const hull::BeliefCache& cache_;
    ControllerConfig cfg_;
};

// AOC rollout with Gaussian action noise injected from `inject_at` on. The
// residual trace entries reflect the executed action's belief, so the
// disturbance is visible the moment it starts.
struct OodRun {
    RolloutResult rollout;
    std::vector<double> residual_trace;
};
OodRun ood_rollout(RolloutEnv& env, const belief::BeliefModel& model,
                   const hull::BeliefCache& cache, const ControllerConfig& cfg, int inject_at,
                   double noise_sigma, Rng& rng);

// Three-sigma flagging against a calibration window [cal_begin, cal_end).
std::vector<bool> ood_detect(const std::vector<double>& residual_trace, int cal_begin, int cal_end);

}  // namespace aoc::ctrl
