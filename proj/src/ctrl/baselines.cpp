#include "aoc/ctrl/baselines.hpp"

#include <Eigen/QR>

namespace aoc::ctrl {

namespace {

Vec raw_features(const corpus::CorpusSchema& schema, const Vec& obs, const corpus::HistoryWindow& h) {
    Vec x(schema.d_o + schema.history_length());
    x.head(schema.d_o) = obs;
    x.tail(schema.history_length()) = h.values;
    return x;
}

}  // namespace

RawCache::RawCache(const corpus::DecisionCorpus& c) : schema_(c.schema) {
    if (c.size() == 0) {
        throw Error(ErrorCategory::invalid_argument, "RawCache: empty corpus");
    }
    features_ = Mat(c.size(), schema_.d_o + schema_.history_length());
    values_ = Vec(c.size());
    actions_ = Mat(c.size(), schema_.d_a);
    for (int i = 0; i < c.size(); ++i) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        features_.row(i) = raw_features(schema_, e.obs, e.history).transpose();
        values_(i) = e.value;
        actions_.row(i) = e.action.transpose();
    }
    tree_.build(features_);
}

Vec RawCache::knn_action(const Vec& obs, const corpus::HistoryWindow& h, int k) const {
    if (k < 1) throw Error(ErrorCategory::invalid_argument, "knn_action: k must be >= 1");
    k = std::min(k, size());
    const std::vector<int> ids = tree_.knn(raw_features(schema_, obs, h), k);
    int best = ids[0];
    for (int id : ids) {
        if (values_(id) > values_(best)) best = id;
    }
    return actions_.row(best).transpose();
}

Vec KnnPolicy::act(const Vec& obs, const env::Trajectory& so_far, Rng&, DecisionRecord*) {
    const corpus::HistoryWindow h =
        corpus::history_at(so_far, static_cast<int>(so_far.size()), cache_.schema());
    return cache_.knn_action(obs, h, k_);
}

BcLinear bc_linear(const corpus::DecisionCorpus& c) {
    if (c.size() == 0) throw Error(ErrorCategory::invalid_argument, "bc_linear: empty corpus");
    const int d_in = c.schema.d_o + c.schema.history_length();
    Mat Phi(c.size(), d_in + 1);
    Mat Y(c.size(), c.schema.d_a);
    for (int i = 0; i < c.size(); ++i) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        Phi.row(i).head(d_in) = raw_features(c.schema, e.obs, e.history).transpose();
        Phi(i, d_in) = 1.0;
        Y.row(i) = e.action.transpose();
    }

    Eigen::ColPivHouseholderQR<Mat> qr(Phi);
    Mat coef;
    if (qr.rank() == Phi.cols()) {
        coef = qr.solve(Y);
    } else {
        // Rank-deficient design: ridge with a small diagonal load.
        Mat G = Phi.transpose() * Phi;
        G.diagonal().array() += 1e-6;
        coef = G.ldlt().solve(Phi.transpose() * Y);
    }

    BcLinear out;
    out.schema = c.schema;
    out.weights = coef.topRows(d_in).transpose();
    out.bias = coef.row(d_in).transpose();
    return out;
}

Vec bc_act(const BcLinear& policy, const Vec& obs, const corpus::HistoryWindow& h) {
    return policy.weights * raw_features(policy.schema, obs, h) + policy.bias;
}

Vec BcPolicy::act(const Vec& obs, const env::Trajectory& so_far, Rng&, DecisionRecord*) {
    const corpus::HistoryWindow h =
        corpus::history_at(so_far, static_cast<int>(so_far.size()), model_.schema);
    return bc_act(model_, obs, h);
}

}  // namespace aoc::ctrl
