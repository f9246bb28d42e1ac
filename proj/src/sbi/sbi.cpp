#include "aoc/sbi/sbi.hpp"

namespace aoc::sbi {

SbiModel SbiModel::load(const std::string& path) {
    LoadedModel lm = load_model(path);
    if (lm.kind != "sbi") {
        throw Error(ErrorCategory::schema_mismatch, "expected an sbi model, got kind " + lm.kind);
    }
    SbiModel m;
    m.schema = lm.schema;
    m.net = std::move(lm.net);
    m.meta = lm.meta;
    return m;
}

namespace {

Mat corpus_inputs_sbi(const corpus::DecisionCorpus& c) {
    Mat X(c.size(), corpus::flat_input_length(c.schema));
    for (int i = 0; i < c.size(); ++i) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        X.row(i) = corpus::flatten_entry(c.schema, e.obs, Vec(), e.history).transpose();
    }
    return X;
}

}  // namespace

SbiModel train_sbi(const corpus::DecisionCorpus& c, const TrainConfig& cfg) {
    if (c.size() == 0) throw Error(ErrorCategory::invalid_argument, "train_sbi: empty corpus");
    if (!c.schema.reward_free) {
        throw Error(ErrorCategory::schema_mismatch,
                    "train_sbi: expected a reward-free corpus (strip_rewards)");
    }

    Mat X = corpus_inputs_sbi(c);
    Mat Y(c.size(), c.schema.d_a);
    for (int i = 0; i < c.size(); ++i) {
        Y.row(i) = c.entries[static_cast<size_t>(i)].action.transpose();
    }

    // Per-dimension action standardization, folded back into the affine head
    // after training (same treatment the value trainer gives its targets).
    const Vec mean = Y.colwise().mean();
    Vec std(c.schema.d_a);
    for (int j = 0; j < c.schema.d_a; ++j) {
        std(j) = std::max(std::sqrt((Y.col(j).array() - mean(j)).square().mean()), 1e-12);
    }
    Mat Ys = (Y.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();

    SbiModel model;
    model.schema = c.schema;
    const nn::TrainReport report = nn::train_mlp(model.net, X, Ys, cfg);
    model.net.Wh = std.asDiagonal() * model.net.Wh;
    model.net.bh = std.cwiseProduct(model.net.bh) + mean;

    model.meta.seed = cfg.seed;
    model.meta.epochs = report.epochs;
    {
        Mat Xs = (X.rowwise() - model.net.in_shift.transpose()).array().rowwise() /
                 model.net.in_scale.transpose().array();
        model.meta.final_loss = nn::batch_loss(model.net, Xs, Y);
    }
    return model;
}

hull::BeliefCache build_sbi_cache(const SbiModel& model, const corpus::DecisionCorpus& c) {
    if (!model.schema.compatible(c.schema)) {
        throw Error(ErrorCategory::schema_mismatch, "build_sbi_cache: schema mismatch");
    }
    Mat beliefs = model.encode_batch(corpus_inputs_sbi(c));
    Mat actions(c.size(), c.schema.d_a);
    std::vector<std::string> tags(static_cast<size_t>(c.size()));
    for (int i = 0; i < c.size(); ++i) {
        actions.row(i) = c.entries[static_cast<size_t>(i)].action.transpose();
        tags[static_cast<size_t>(i)] = c.entries[static_cast<size_t>(i)].policy_tag;
    }
    return hull::BeliefCache(std::move(beliefs), Vec(), std::move(actions), std::move(tags));
}

AbcDecision abc_act(const SbiModel& model, const hull::BeliefCache& cache, const Vec& obs,
                    const env::Trajectory& so_far, int k_search) {
    const corpus::HistoryWindow h =
        corpus::history_at(so_far, static_cast<int>(so_far.size()), model.schema);
    const Vec b = model.encode(obs, h);
    hull::HullDecomposition dec = hull::minimal_hull(cache, b, model.net.d_b, k_search);

    AbcDecision out;
    out.action = Vec::Zero(model.schema.d_a);
    for (size_t i = 0; i < dec.support.size(); ++i) {
        out.action += dec.weights(static_cast<int>(i)) *
                      cache.actions().row(dec.support[i]).transpose();
    }
    out.record.t = static_cast<int>(so_far.size());
    out.record.action = out.action;
    out.record.decomposition = std::move(dec);
    out.record.effective_action_size = 1;
    return out;
}

int decode_discrete(const Vec& p) {
    int best = 0;
    for (int i = 1; i < p.size(); ++i) {
        if (p(i) > p(best)) best = i;
    }
    return best;
}

}  // namespace aoc::sbi
