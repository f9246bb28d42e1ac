#pragma once

#include "aoc/ctrl/controller.hpp"
#include "aoc/hull/cache.hpp"
#include "aoc/model_io.hpp"
#include "aoc/nn/mlp.hpp"

#include <string>

namespace aoc::sbi {

using TrainConfig = nn::TrainSettings;

// Reward-free variant: the belief is a function of (o, h) only and the
// affine head emits actions. Control-time actions are synthesized as convex
// combinations of corpus actions, not as head outputs; the head exists to
// shape the belief space.
struct SbiModel {
    corpus::CorpusSchema schema;  // reward_free = true
    nn::Mlp net;                  // d_out = d_a
    ModelMeta meta;

    Vec encode(const Vec& obs, const corpus::HistoryWindow& history) const {
        return net.embed(corpus::flatten_entry(schema, obs, Vec(), history));
    }
    Mat encode_batch(const Mat& X_raw) const { return net.embed_batch(X_raw); }
    Vec head(const Vec& b) const { return net.Wh * b + net.bh; }

    void save(const std::string& path) const { save_model(path, "sbi", schema, net, meta); }
    static SbiModel load(const std::string& path);
};

SbiModel train_sbi(const corpus::DecisionCorpus& reward_free_corpus, const TrainConfig& cfg);

hull::BeliefCache build_sbi_cache(const SbiModel& model, const corpus::DecisionCorpus& corpus);

struct AbcDecision {
    Vec action;  // sum w^c a^c
    ctrl::DecisionRecord record;
};

AbcDecision abc_act(const SbiModel& model, const hull::BeliefCache& cache, const Vec& obs,
                    const env::Trajectory& so_far, int k_search = -1);

// Decode rule for one-hot corpus actions: the convex combination is a
// probability over actions; emit the arg-max coordinate (ties to the lower
// index).
int decode_discrete(const Vec& action_probabilities);

}  // namespace aoc::sbi
