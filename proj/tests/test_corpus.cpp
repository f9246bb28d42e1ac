#include "aoc/corpus/corpus.hpp"
#include "aoc/env/dataset.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aoc;
using namespace aoc::corpus;

namespace {

env::Trajectory make_traj(int episode_id, const std::vector<double>& rewards, int d_o = 2,
                          int d_a = 1) {
    env::Trajectory traj;
    for (size_t t = 0; t < rewards.size(); ++t) {
        env::Transition tr;
        tr.episode_id = episode_id;
        tr.t = static_cast<int>(t);
        tr.obs = Vec::Constant(d_o, static_cast<double>(t) + 0.5);
        tr.action = Vec::Constant(d_a, -static_cast<double>(t));
        tr.reward = rewards[t];
        tr.next_obs = Vec::Constant(d_o, static_cast<double>(t) + 1.5);
        tr.policy_tag = episode_id % 2 == 0 ? "even" : "odd";
        tr.done = t + 1 == rewards.size();
        traj.push_back(tr);
    }
    return traj;
}

}  // namespace

TEST_CASE("compute_returns matches the hand-computed recursion") {
    const auto v = compute_returns({1.0, 1.0, 1.0}, 0.9);
    CHECK(v[0] == doctest::Approx(2.71).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(v[2] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(compute_returns({5.0}, 0.3)[0] == 5.0);
    const auto zeros = compute_returns({0.0, 0.0, 0.0, 0.0}, 0.99);
    for (double z : zeros) CHECK(z == 0.0);
    CHECK_THROWS_AS(compute_returns({}, 0.9), Error);
}

TEST_CASE("corpus values equal an independent forward-sum oracle") {
    Rng rng(13);
    std::vector<env::Trajectory> trajs;
    for (int e = 0; e < 5; ++e) {
        std::vector<double> rewards;
        for (int t = 0; t < 37; ++t) rewards.push_back(rng.uniform(-2.0, 2.0));
        trajs.push_back(make_traj(e, rewards));
    }
    const double gamma = 0.97;
    const DecisionCorpus c = build_corpus(trajs, gamma, 4);
    REQUIRE(c.size() == 5 * 37);

    for (const CorpusEntry& entry : c.entries) {
        // Forward-sum oracle over the remaining steps of the episode.
        const env::Trajectory& traj = trajs[static_cast<size_t>(entry.episode_id)];
        double expected = 0.0;
        double g = 1.0;
        for (size_t t = static_cast<size_t>(entry.t); t < traj.size(); ++t) {
            expected += g * traj[t].reward;
            g *= gamma;
        }
        REQUIRE(entry.value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("return recursion holds exactly inside every episode") {
    Rng rng(29);
    std::vector<env::Trajectory> trajs;
    std::vector<double> rewards;
    for (int t = 0; t < 50; ++t) rewards.push_back(rng.uniform(-1.0, 1.0));
    trajs.push_back(make_traj(0, rewards));
    const double gamma = 0.9;
    const DecisionCorpus c = build_corpus(trajs, gamma, 4);
    for (int t = 0; t + 1 < 50; ++t) {
        const double lhs = c.entries[static_cast<size_t>(t)].value;
        const double rhs = rewards[static_cast<size_t>(t)] +
                           gamma * c.entries[static_cast<size_t>(t) + 1].value;
        REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-15));
    }
}

TEST_CASE("history windows: padding at start, reconstruction later") {
    std::vector<env::Trajectory> trajs{make_traj(0, std::vector<double>(20, 1.0))};
    const DecisionCorpus c = build_corpus(trajs, 0.99, 4);

    const CorpusEntry& first = c.entries[0];
    CHECK(first.history.mask.sum() == 0.0);
    CHECK(first.history.values.cwiseAbs().sum() == 0.0);

    // For t >= M the concatenated history recovers the raw log.
    const int d_o = 2, d_a = 1, slot = d_o + d_a + 1;
    for (int t = 4; t < 20; ++t) {
        const CorpusEntry& e = c.entries[static_cast<size_t>(t)];
        CHECK(e.history.mask.sum() == 4.0);
        for (int j = 0; j < 4; ++j) {
            const env::Transition& tr = trajs[0][static_cast<size_t>(t - 4 + j)];
            const Vec slot_values = e.history.values.segment(j * slot, slot);
            REQUIRE(slot_values.head(d_o) == tr.obs);
            REQUIRE(slot_values.segment(d_o, d_a) == tr.action);
            REQUIRE(slot_values(d_o + d_a) == tr.reward);
        }
    }
}

TEST_CASE("resample duplicates tagged trajectories and keeps others intact") {
    std::vector<env::Trajectory> trajs;
    for (int e = 0; e < 10; ++e) trajs.push_back(make_traj(e, std::vector<double>(8, 0.5)));
    const DecisionCorpus c = build_corpus(trajs, 0.99, 4);

    Rng rng(1);
    const DecisionCorpus doubled = resample(c, "even", 2.0, rng);
    int even_episodes = 0, odd_episodes = 0;
    int last_episode = -1;
    for (const CorpusEntry& e : doubled.entries) {
        if (e.episode_id != last_episode) {
            last_episode = e.episode_id;
            (e.policy_tag == "even" ? even_episodes : odd_episodes)++;
        }
    }
    CHECK(even_episodes == 10);
    CHECK(odd_episodes == 5);

    // Identity at rate 1: corpora compare equal field by field.
    Rng rng2(2);
    const DecisionCorpus same = resample(c, "even", 1.0, rng2);
    REQUIRE(same.size() == c.size());
    for (int i = 0; i < c.size(); ++i) {
        const CorpusEntry& a = c.entries[static_cast<size_t>(i)];
        const CorpusEntry& b = same.entries[static_cast<size_t>(i)];
        REQUIRE(a.id == b.id);
        REQUIRE(a.episode_id == b.episode_id);
        REQUIRE(a.value == b.value);
        REQUIRE(a.obs == b.obs);
    }

    // Untagged trajectories are untouched by sub-sampling too.
    Rng rng3(3);
    const DecisionCorpus sub = resample(c, "even", 0.4, rng3);
    int odd_after = 0;
    last_episode = -1;
    for (const CorpusEntry& e : sub.entries) {
        if (e.episode_id != last_episode) {
            last_episode = e.episode_id;
            if (e.policy_tag == "odd") ++odd_after;
        }
    }
    CHECK(odd_after == 5);

    CHECK_THROWS_AS(resample(c, "nope", 2.0, rng), Error);
}

TEST_CASE("subsampling keeps roughly the requested fraction") {
    std::vector<env::Trajectory> trajs;
    for (int e = 0; e < 10000; ++e) trajs.push_back(make_traj(e, {1.0}));
    const DecisionCorpus c = build_corpus(trajs, 0.99, 2);
    Rng rng(77);
    const DecisionCorpus half = resample(c, "even", 0.5, rng);
    int even_kept = 0;
    for (const CorpusEntry& e : half.entries) {
        if (e.policy_tag == "even") ++even_kept;
    }
    const double fraction = static_cast<double>(even_kept) / 5000.0;
    CHECK(fraction >= 0.48);
    CHECK(fraction <= 0.52);
}

TEST_CASE("strip_rewards drops values and reward slots") {
    std::vector<env::Trajectory> trajs{make_traj(0, std::vector<double>(12, 2.0))};
    const DecisionCorpus c = build_corpus(trajs, 0.99, 4);
    const DecisionCorpus s = strip_rewards(c);
    CHECK(s.size() == c.size());
    CHECK(s.schema.reward_free);
    CHECK(s.schema.history_length() == 4 * (2 + 1));
    for (const CorpusEntry& e : s.entries) REQUIRE(e.value == 0.0);

    // Round-trip of the stripped corpus.
    const std::string path = "test_corpus_stripped.aoc";
    save_corpus(s, path);
    const DecisionCorpus loaded = load_corpus(path);
    CHECK(loaded.schema.reward_free);
    CHECK(loaded.size() == s.size());
    std::filesystem::remove(path);
}

TEST_CASE("corpus save/load round-trip and truncation error") {
    std::vector<env::Trajectory> trajs;
    for (int e = 0; e < 3; ++e) trajs.push_back(make_traj(e, std::vector<double>(9, -0.25)));
    const DecisionCorpus c = build_corpus(trajs, 0.95, 4);
    const std::string path = "test_corpus_rt.aoc";
    save_corpus(c, path);
    const DecisionCorpus loaded = load_corpus(path);
    REQUIRE(loaded.size() == c.size());
    REQUIRE(loaded.schema.gamma == c.schema.gamma);
    for (int i = 0; i < c.size(); ++i) {
        const CorpusEntry& a = c.entries[static_cast<size_t>(i)];
        const CorpusEntry& b = loaded.entries[static_cast<size_t>(i)];
        REQUIRE(a.obs == b.obs);
        REQUIRE(a.action == b.action);
        REQUIRE(a.history.values == b.history.values);
        REQUIRE(a.history.mask == b.history.mask);
        REQUIRE(a.value == b.value);
        REQUIRE(a.policy_tag == b.policy_tag);
    }

    // Truncated file: explicit parse error, no partial corpus.
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string full = ss.str();
    std::ofstream out("test_corpus_trunc.aoc");
    out << full.substr(0, full.size() * 2 / 3);
    out.close();
    CHECK_THROWS_AS(load_corpus("test_corpus_trunc.aoc"), Error);
    std::filesystem::remove(path);
    std::filesystem::remove("test_corpus_trunc.aoc");
}
