#pragma once

#include "aoc/corpus/corpus.hpp"
#include "aoc/model_io.hpp"
#include "aoc/nn/mlp.hpp"

#include <string>

namespace aoc::belief {

using TrainConfig = nn::TrainSettings;

// Learned decomposition V = l . b: an MLP encoder producing the belief b and
// a strictly affine scalar head l. The value-standardization used during
// training is folded into the head, so predictions are in raw value units.
struct BeliefModel {
    corpus::CorpusSchema schema;
    nn::Mlp net;  // d_out = 1
    ModelMeta meta;

    Vec encode(const Vec& obs, const Vec& action, const corpus::HistoryWindow& history) const {
        return net.embed(corpus::flatten_entry(schema, obs, action, history));
    }
    Vec encode_flat(const Vec& x_raw) const { return net.embed(x_raw); }
    Mat encode_batch(const Mat& X_raw) const { return net.embed_batch(X_raw); }

    double predict_value(const Vec& b) const {
        if (b.size() != net.d_b) {
            throw Error(ErrorCategory::schema_mismatch, "predict_value: belief length mismatch");
        }
        return net.Wh.row(0).dot(b) + net.bh(0);
    }

    // ||l||_op with Euclidean norms; the head bias cancels under differences,
    // which is where the estimation bound applies.
    double operator_norm() const { return net.Wh.row(0).norm(); }

    void save(const std::string& path) const { save_model(path, "value", schema, net, meta); }
    static BeliefModel load(const std::string& path);
};

BeliefModel train(const corpus::DecisionCorpus& corpus, const TrainConfig& cfg);

// Raw model inputs for every corpus entry, one row per entry id.
Mat corpus_inputs(const corpus::DecisionCorpus& corpus);

// Belief cache rows aligned with entry ids.
Mat embed_corpus(const BeliefModel& model, const corpus::DecisionCorpus& corpus);

}  // namespace aoc::belief
