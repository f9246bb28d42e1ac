#include "aoc/ctrl/controller.hpp"

#include "aoc/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace aoc::ctrl {

double estimate_value(const hull::HullDecomposition& dec, const hull::BeliefCache& cache) {
    double v = 0.0;
    for (size_t i = 0; i < dec.support.size(); ++i) {
        const int id = dec.support[i];
        if (id < 0 || id >= cache.size()) {
            throw Error(ErrorCategory::invalid_argument, "estimate_value: support id out of range");
        }
        v += dec.weights(static_cast<int>(i)) * cache.values()(id);
    }
    return v;
}

namespace {

corpus::HistoryWindow window_from(const env::Trajectory& so_far, const corpus::CorpusSchema& schema) {
    return corpus::history_at(so_far, static_cast<int>(so_far.size()), schema);
}

}  // namespace

DecisionRecord select_action(const belief::BeliefModel& model, const hull::BeliefCache& cache,
                             const Vec& obs, const env::Trajectory& so_far,
                             const ControllerConfig& cfg, Rng& rng) {
    if (cfg.K < 1) throw Error(ErrorCategory::invalid_argument, "select_action: K must be >= 1");
    const int d_a = model.schema.d_a;
    if (cfg.action_low.size() != d_a || cfg.action_high.size() != d_a) {
        throw Error(ErrorCategory::schema_mismatch, "select_action: action bounds mismatch");
    }

    // All rng consumption happens before evaluation.
    Mat actions(cfg.K, d_a);
    for (int k = 0; k < cfg.K; ++k) {
        for (int j = 0; j < d_a; ++j) {
            actions(k, j) = rng.uniform(cfg.action_low(j), cfg.action_high(j));
        }
    }

    const corpus::HistoryWindow h = window_from(so_far, model.schema);
    Mat X(cfg.K, corpus::flat_input_length(model.schema));
    for (int k = 0; k < cfg.K; ++k) {
        X.row(k) = corpus::flatten_entry(model.schema, obs, actions.row(k).transpose(), h).transpose();
    }
    const Mat beliefs = model.encode_batch(X);

    DecisionRecord rec;
    rec.t = static_cast<int>(so_far.size());
    rec.candidates.resize(static_cast<size_t>(cfg.K));
    std::vector<hull::HullDecomposition> decs(static_cast<size_t>(cfg.K));
    std::vector<double> residuals(static_cast<size_t>(cfg.K));
    // Sampling is already done; candidate evaluation is read-only and safe to
    // split across workers.
    parallel_for(cfg.K, [&](int k) {
        decs[static_cast<size_t>(k)] =
            hull::minimal_hull(cache, beliefs.row(k).transpose(), model.net.d_b, cfg.k_search);
        residuals[static_cast<size_t>(k)] = decs[static_cast<size_t>(k)].residual;
        CandidateSummary& cs = rec.candidates[static_cast<size_t>(k)];
        cs.action = actions.row(k).transpose();
        cs.residual = decs[static_cast<size_t>(k)].residual;
        cs.value = estimate_value(decs[static_cast<size_t>(k)], cache);
    });

    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    const int idx = std::max(0, static_cast<int>(std::ceil(cfg.epsilon * cfg.K)) - 1);
    const double threshold = sorted[static_cast<size_t>(std::min(idx, cfg.K - 1))];

    int chosen = -1;
    int survivors = 0;
    for (int k = 0; k < cfg.K; ++k) {
        CandidateSummary& cs = rec.candidates[static_cast<size_t>(k)];
        cs.filtered = cs.residual > threshold;
        if (cs.filtered) continue;
        ++survivors;
        if (chosen < 0 || cs.value > rec.candidates[static_cast<size_t>(chosen)].value) {
            chosen = k;
        }
    }

    rec.effective_action_size = survivors;
    rec.action = rec.candidates[static_cast<size_t>(chosen)].action;
    rec.value = rec.candidates[static_cast<size_t>(chosen)].value;
    rec.decomposition = decs[static_cast<size_t>(chosen)];

    // Diagnostic: the decomposition identity with head predictions in place
    // of raw corpus values.
    double head_sum = 0.0;
    const hull::HullDecomposition& dec = rec.decomposition;
    for (size_t i = 0; i < dec.support.size(); ++i) {
        head_sum += dec.weights(static_cast<int>(i)) *
                    model.predict_value(cache.beliefs().row(dec.support[i]).transpose());
    }
    rec.head_consistency_gap =
        std::abs(head_sum - model.predict_value(beliefs.row(chosen).transpose()));
    return rec;
}

Vec AocPolicy::act(const Vec& obs, const env::Trajectory& so_far, Rng& rng, DecisionRecord* record) {
    DecisionRecord rec = select_action(model_, cache_, obs, so_far, cfg_, rng);
    const Vec action = rec.action;
    if (record) *record = std::move(rec);
    return action;
}

RolloutResult rollout(RolloutEnv& env, Policy& policy, int horizon, Rng& rng) {
    RolloutResult out;
    Vec obs = env.reset(rng);
    for (int t = 0; t < horizon; ++t) {
        DecisionRecord rec;
        const Vec action = policy.act(obs, out.trajectory, rng, &rec);
        const RolloutEnv::Step step = env.step(action);

        env::Transition tr;
        tr.episode_id = 0;
        tr.t = t;
        tr.obs = obs;
        tr.action = action;
        tr.reward = step.reward;
        tr.next_obs = step.obs;
        tr.done = step.done || t == horizon - 1;
        out.trajectory.push_back(std::move(tr));
        out.records.push_back(std::move(rec));
        out.score += step.reward;
        obs = step.obs;
        if (step.done) break;
    }
    return out;
}

OodRun ood_rollout(RolloutEnv& env, const belief::BeliefModel& model,
                   const hull::BeliefCache& cache, const ControllerConfig& cfg, int inject_at,
                   double noise_sigma, Rng& rng) {
    OodRun out;
    Vec obs = env.reset(rng);
    for (int t = 0; t < env.horizon(); ++t) {
        DecisionRecord rec = select_action(model, cache, obs, out.rollout.trajectory, cfg, rng);
        Vec action = rec.action;
        if (t >= inject_at) {
            for (int j = 0; j < action.size(); ++j) {
                action(j) = clip(action(j) + rng.normal(0.0, noise_sigma), cfg.action_low(j),
                                 cfg.action_high(j));
            }
            // Residual of the executed (disturbed) action's belief.
            const corpus::HistoryWindow h =
                corpus::history_at(out.rollout.trajectory,
                                   static_cast<int>(out.rollout.trajectory.size()), model.schema);
            const Vec b = model.encode(obs, action, h);
            const hull::HullDecomposition dec =
                hull::minimal_hull(cache, b, model.net.d_b, cfg.k_search);
            out.residual_trace.push_back(dec.residual);
        } else {
            out.residual_trace.push_back(rec.decomposition.residual);
        }

        const RolloutEnv::Step step = env.step(action);
        env::Transition tr;
        tr.t = t;
        tr.obs = obs;
        tr.action = action;
        tr.reward = step.reward;
        tr.next_obs = step.obs;
        tr.done = step.done || t == env.horizon() - 1;
        out.rollout.trajectory.push_back(std::move(tr));
        out.rollout.records.push_back(std::move(rec));
        out.rollout.score += step.reward;
        obs = step.obs;
        if (step.done) break;
    }
    return out;
}

std::vector<bool> ood_detect(const std::vector<double>& trace, int cal_begin, int cal_end) {
    const int n = static_cast<int>(trace.size());
    if (cal_begin < 0 || cal_end > n || cal_end - cal_begin < 30) {
        throw Error(ErrorCategory::invalid_argument,
                    "ood_detect: calibration range must lie in the trace with length >= 30");
    }
    double mean = 0.0;
    for (int i = cal_begin; i < cal_end; ++i) mean += trace[static_cast<size_t>(i)];
    mean /= static_cast<double>(cal_end - cal_begin);
    double var = 0.0;
    for (int i = cal_begin; i < cal_end; ++i) {
        const double d = trace[static_cast<size_t>(i)] - mean;
        var += d * d;
    }
    var /= static_cast<double>(cal_end - cal_begin);
    const double std = std::max(std::sqrt(var), 1e-12);

    std::vector<bool> flags(trace.size());
    for (size_t i = 0; i < trace.size(); ++i) flags[i] = trace[i] > mean + 3.0 * std;
    return flags;
}

}  // namespace aoc::ctrl
