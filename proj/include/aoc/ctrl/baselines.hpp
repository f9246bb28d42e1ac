#pragma once

#include "aoc/corpus/corpus.hpp"
#include "aoc/ctrl/controller.hpp"
#include "aoc/hull/kdtree.hpp"

#include <memory>

namespace aoc::ctrl {

// Raw-space index for the nearest-neighbor baselines: plain Euclidean
// distance over the flattened (o, h), no learned metric.
class RawCache {
public:
    explicit RawCache(const corpus::DecisionCorpus& corpus);

    // Action of the best-valued entry among the k nearest (k=1 reduces to
    // the nearest neighbor's action).
    Vec knn_action(const Vec& obs, const corpus::HistoryWindow& h, int k) const;

    const corpus::CorpusSchema& schema() const { return schema_; }
    int size() const { return static_cast<int>(features_.rows()); }

private:
    corpus::CorpusSchema schema_;
    Mat features_;
    Vec values_;
    Mat actions_;
    hull::KdTree tree_;
};

class KnnPolicy : public Policy {
public:
    KnnPolicy(const RawCache& cache, int k) : cache_(cache), k_(k) {}
    Vec act(const Vec& obs, const env::Trajectory& so_far, Rng& rng, DecisionRecord* rec) override;

private:
    const RawCache& cache_;
    int k_;
};

// Behavior cloning with a linear (affine) model on flattened (o, h).
struct BcLinear {
    corpus::CorpusSchema schema;
    Mat weights;  // d_a x d_in
    Vec bias;     // d_a
};

BcLinear bc_linear(const corpus::DecisionCorpus& corpus);
Vec bc_act(const BcLinear& policy, const Vec& obs, const corpus::HistoryWindow& h);

class BcPolicy : public Policy {
public:
    explicit BcPolicy(BcLinear model) : model_(std::move(model)) {}
    Vec act(const Vec& obs, const env::Trajectory& so_far, Rng& rng, DecisionRecord* rec) override;

private:
    BcLinear model_;
};

}  // namespace aoc::ctrl
