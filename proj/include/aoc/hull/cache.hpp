#pragma once

#include "aoc/belief/model.hpp"
#include "aoc/hull/kdtree.hpp"

#include <memory>
#include <string>
#include <vector>

namespace aoc::hull {

// Immutable embedding of a corpus: belief rows aligned with entry ids plus
// the per-entry payloads a decomposition needs (values for control, actions
// for the imitation variant, tags for provenance).
class BeliefCache {
public:
    BeliefCache(Mat beliefs, Vec values, Mat actions, std::vector<std::string> tags);

    static BeliefCache from_corpus(const belief::BeliefModel& model,
                                   const corpus::DecisionCorpus& corpus);

    const Mat& beliefs() const { return beliefs_; }
    const Vec& values() const { return values_; }
    const Mat& actions() const { return actions_; }
    const std::vector<std::string>& tags() const { return tags_; }
    int size() const { return static_cast<int>(beliefs_.rows()); }
    int dim() const { return static_cast<int>(beliefs_.cols()); }

    // Exact k nearest entry ids by ascending Euclidean distance, ties broken
    // by lower entry id.
    std::vector<int> knn(const Vec& q, int k) const;

private:
    Mat beliefs_;
    Vec values_;
    Mat actions_;
    std::vector<std::string> tags_;
    KdTree tree_;
};

}  // namespace aoc::hull
