#include "aoc/hull/cache.hpp"

namespace aoc::hull {

BeliefCache::BeliefCache(Mat beliefs, Vec values, Mat actions, std::vector<std::string> tags)
    : beliefs_(std::move(beliefs)),
      values_(std::move(values)),
      actions_(std::move(actions)),
      tags_(std::move(tags)) {
    if (beliefs_.rows() == 0) {
        throw Error(ErrorCategory::invalid_argument, "BeliefCache: empty belief matrix");
    }
    if (!beliefs_.allFinite()) {
        throw Error(ErrorCategory::numeric_divergence, "BeliefCache: non-finite beliefs");
    }
    if (values_.size() != 0 && values_.size() != beliefs_.rows()) {
        throw Error(ErrorCategory::schema_mismatch, "BeliefCache: values misaligned");
    }
    if (actions_.rows() != 0 && actions_.rows() != beliefs_.rows()) {
        throw Error(ErrorCategory::schema_mismatch, "BeliefCache: actions misaligned");
    }
    if (!tags_.empty() && static_cast<int>(tags_.size()) != beliefs_.rows()) {
        throw Error(ErrorCategory::schema_mismatch, "BeliefCache: tags misaligned");
    }
    tree_.build(beliefs_);
}

BeliefCache BeliefCache::from_corpus(const belief::BeliefModel& model,
                                     const corpus::DecisionCorpus& c) {
    Mat beliefs = belief::embed_corpus(model, c);
    Vec values(c.size());
    Mat actions(c.size(), c.schema.d_a);
    std::vector<std::string> tags(static_cast<size_t>(c.size()));
    for (int i = 0; i < c.size(); ++i) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        values(i) = e.value;
        actions.row(i) = e.action.transpose();
        tags[static_cast<size_t>(i)] = e.policy_tag;
    }
    return BeliefCache(std::move(beliefs), std::move(values), std::move(actions), std::move(tags));
}

std::vector<int> BeliefCache::knn(const Vec& q, int k) const {
    return tree_.knn(q, k);
}

}  // namespace aoc::hull
