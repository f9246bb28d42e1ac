#include "aoc/belief/model.hpp"

#include <cmath>

namespace aoc::belief {

BeliefModel BeliefModel::load(const std::string& path) {
    LoadedModel lm = load_model(path);
    if (lm.kind != "value") {
        throw Error(ErrorCategory::schema_mismatch, "expected a value model, got kind " + lm.kind);
    }
    BeliefModel m;
    m.schema = lm.schema;
    m.net = std::move(lm.net);
    m.meta = lm.meta;
    return m;
}

Mat corpus_inputs(const corpus::DecisionCorpus& c) {
    const int n_in = corpus::flat_input_length(c.schema);
    Mat X(c.size(), n_in);
    for (int i = 0; i < c.size(); ++i) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        X.row(i) = corpus::flatten_entry(c.schema, e.obs, e.action, e.history).transpose();
    }
    return X;
}

BeliefModel train(const corpus::DecisionCorpus& c, const TrainConfig& cfg) {
    if (c.size() == 0) {
        throw Error(ErrorCategory::invalid_argument, "belief::train: empty corpus");
    }
    if (c.schema.reward_free) {
        throw Error(ErrorCategory::schema_mismatch, "belief::train: corpus has no values");
    }

    Mat X = corpus_inputs(c);
    Vec y(c.size());
    for (int i = 0; i < c.size(); ++i) y(i) = c.entries[static_cast<size_t>(i)].value;

    const double mean = y.mean();
    const double std = std::max(std::sqrt((y.array() - mean).square().mean()), 1e-12);
    Mat Y = ((y.array() - mean) / std).matrix();

    BeliefModel model;
    model.schema = c.schema;
    const nn::TrainReport report = nn::train_mlp(model.net, X, Y, cfg);

    // Fold the value standardization into the affine head: predictions and
    // the operator norm are then in raw value units.
    model.net.Wh *= std;
    model.net.bh = model.net.bh * std + Vec::Constant(1, mean);

    model.meta.seed = cfg.seed;
    model.meta.epochs = report.epochs;
    model.meta.value_mean = mean;
    model.meta.value_std = std;
    {
        Mat Xs = (X.rowwise() - model.net.in_shift.transpose()).array().rowwise() /
                 model.net.in_scale.transpose().array();
        model.meta.final_loss = nn::batch_loss(model.net, Xs, Mat(y));
    }
    return model;
}

Mat embed_corpus(const BeliefModel& model, const corpus::DecisionCorpus& c) {
    if (!model.schema.compatible(c.schema)) {
        throw Error(ErrorCategory::schema_mismatch, "embed_corpus: corpus/model schema mismatch");
    }
    return model.encode_batch(corpus_inputs(c));
}

}  // namespace aoc::belief
