#pragma once

#include "aoc/common.hpp"
#include "aoc/env/types.hpp"
#include "aoc/rng.hpp"

#include <string>
#include <vector>

namespace aoc::corpus {

// Fixed-length window over the last M transitions, zero-padded at episode
// start. `values` is the flattened (o, a, r) triples oldest-first; a
// reward-free window drops the r slots. `mask` marks which slots are real.
struct HistoryWindow {
    Vec values;
    Vec mask;

    static int flat_length(int M, int d_o, int d_a, bool reward_free) {
        return M * (d_o + d_a + (reward_free ? 0 : 1));
    }
};

struct CorpusSchema {
    int d_o = 0;
    int d_a = 0;
    int M = 4;
    double gamma = 0.99;
    bool reward_free = false;
    int version = 1;

    bool compatible(const CorpusSchema& other) const {
        return d_o == other.d_o && d_a == other.d_a && M == other.M &&
               reward_free == other.reward_free && version == other.version;
    }
    int history_length() const { return HistoryWindow::flat_length(M, d_o, d_a, reward_free); }
};

struct CorpusEntry {
    int id = 0;
    Vec obs;
    Vec action;
    HistoryWindow history;
    double value = 0.0;
    std::string policy_tag;
    int episode_id = 0;
    int t = 0;
};

struct DecisionCorpus {
    CorpusSchema schema;
    std::vector<CorpusEntry> entries;

    int size() const { return static_cast<int>(entries.size()); }
};

// Discounted return-to-go for one complete episode: v_t = r_t + gamma v_{t+1}.
std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma);

DecisionCorpus build_corpus(const std::vector<env::Trajectory>& trajectories, double gamma, int M);

// Whole-trajectory resampling of one policy tag. rate >= 1 duplicates each
// tagged trajectory floor(rate) times plus one more with probability
// frac(rate); rate < 1 keeps each tagged trajectory with probability rate.
DecisionCorpus resample(const DecisionCorpus& corpus, const std::string& policy_tag, double rate, Rng& rng);

// Reward-free view for the strictly-batch imitation setting: values gone,
// histories reduced to (o, a) pairs.
DecisionCorpus strip_rewards(const DecisionCorpus& corpus);

void save_corpus(const DecisionCorpus& corpus, const std::string& path);
DecisionCorpus load_corpus(const std::string& path);

// Flattened (o, a, h, mask) model input for a corpus entry; the layout every
// value model consumes. Reward-free corpora use (o, h, mask) without the
// action block.
Vec flatten_entry(const CorpusSchema& schema, const Vec& obs, const Vec& action,
                  const HistoryWindow& history);
int flat_input_length(const CorpusSchema& schema);

// History window ending just before step t of a trajectory.
HistoryWindow history_at(const env::Trajectory& traj, int t, const CorpusSchema& schema);

// Undiscounted episode returns grouped from corpus entries (per episode_id).
std::vector<double> episode_returns(const std::vector<env::Trajectory>& trajectories);

}  // namespace aoc::corpus
