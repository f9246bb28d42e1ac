#include "aoc/corpus/corpus.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>

namespace aoc::corpus {

std::vector<double> compute_returns(const std::vector<double>& rewards, double gamma) {
    if (rewards.empty()) {
        throw Error(ErrorCategory::invalid_argument, "compute_returns: empty trajectory");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw Error(ErrorCategory::invalid_argument, "compute_returns: gamma must be in (0,1]");
    }
    std::vector<double> values(rewards.size());
    double acc = 0.0;
    for (int t = static_cast<int>(rewards.size()) - 1; t >= 0; --t) {
        acc = rewards[static_cast<size_t>(t)] + gamma * acc;
        values[static_cast<size_t>(t)] = acc;
    }
    return values;
}

HistoryWindow history_at(const env::Trajectory& traj, int t, const CorpusSchema& schema) {
    const int slot = schema.d_o + schema.d_a + (schema.reward_free ? 0 : 1);
    HistoryWindow h;
    h.values = Vec::Zero(schema.M * slot);
    h.mask = Vec::Zero(schema.M);
    for (int j = 0; j < schema.M; ++j) {
        const int k = t - schema.M + j;
        if (k < 0) continue;
        const env::Transition& tr = traj[static_cast<size_t>(k)];
        int off = j * slot;
        h.values.segment(off, schema.d_o) = tr.obs;
        h.values.segment(off + schema.d_o, schema.d_a) = tr.action;
        if (!schema.reward_free) h.values(off + schema.d_o + schema.d_a) = tr.reward;
        h.mask(j) = 1.0;
    }
    return h;
}

int flat_input_length(const CorpusSchema& schema) {
    return schema.d_o + (schema.reward_free ? 0 : schema.d_a) + schema.history_length() + schema.M;
}

Vec flatten_entry(const CorpusSchema& schema, const Vec& obs, const Vec& action,
                  const HistoryWindow& history) {
    if (obs.size() != schema.d_o || history.values.size() != schema.history_length() ||
        history.mask.size() != schema.M) {
        throw Error(ErrorCategory::schema_mismatch, "flatten_entry: shape mismatch");
    }
    Vec x(flat_input_length(schema));
    int off = 0;
    x.segment(off, schema.d_o) = obs;
    off += schema.d_o;
    if (!schema.reward_free) {
        if (action.size() != schema.d_a) {
            throw Error(ErrorCategory::schema_mismatch, "flatten_entry: action shape mismatch");
        }
        x.segment(off, schema.d_a) = action;
        off += schema.d_a;
    }
    x.segment(off, schema.history_length()) = history.values;
    off += schema.history_length();
    x.segment(off, schema.M) = history.mask;
    return x;
}

DecisionCorpus build_corpus(const std::vector<env::Trajectory>& trajectories, double gamma, int M) {
    if (trajectories.empty() || trajectories.front().empty()) {
        throw Error(ErrorCategory::invalid_argument, "build_corpus: no trajectories");
    }
    DecisionCorpus corpus;
    corpus.schema.d_o = static_cast<int>(trajectories.front().front().obs.size());
    corpus.schema.d_a = static_cast<int>(trajectories.front().front().action.size());
    corpus.schema.M = M;
    corpus.schema.gamma = gamma;

    int id = 0;
    for (const env::Trajectory& traj : trajectories) {
        std::vector<double> rewards;
        rewards.reserve(traj.size());
        for (const env::Transition& tr : traj) {
            if (tr.obs.size() != corpus.schema.d_o || tr.action.size() != corpus.schema.d_a) {
                throw Error(ErrorCategory::schema_mismatch,
                            "build_corpus: trajectory dimensions differ");
            }
            rewards.push_back(tr.reward);
        }
        const std::vector<double> values = compute_returns(rewards, gamma);
        for (size_t t = 0; t < traj.size(); ++t) {
            CorpusEntry e;
            e.id = id++;
            e.obs = traj[t].obs;
            e.action = traj[t].action;
            e.history = history_at(traj, static_cast<int>(t), corpus.schema);
            e.value = values[t];
            e.policy_tag = traj[t].policy_tag;
            e.episode_id = traj[t].episode_id;
            e.t = traj[t].t;
            corpus.entries.push_back(std::move(e));
        }
    }
    return corpus;
}

DecisionCorpus resample(const DecisionCorpus& corpus, const std::string& policy_tag, double rate, Rng& rng) {
    if (!(rate > 0.0)) {
        throw Error(ErrorCategory::invalid_argument, "resample: rate must be positive");
    }
    bool tag_seen = false;
    for (const CorpusEntry& e : corpus.entries) {
        if (e.policy_tag == policy_tag) {
            tag_seen = true;
            break;
        }
    }
    if (!tag_seen) {
        throw Error(ErrorCategory::invalid_argument, "resample: unknown policy tag " + policy_tag);
    }

    // Episode groups in file order.
    std::vector<std::pair<int, std::vector<const CorpusEntry*>>> episodes;
    int max_episode_id = 0;
    for (const CorpusEntry& e : corpus.entries) {
        if (episodes.empty() || episodes.back().first != e.episode_id) {
            episodes.push_back({e.episode_id, {}});
        }
        episodes.back().second.push_back(&e);
        max_episode_id = std::max(max_episode_id, e.episode_id);
    }

    DecisionCorpus out;
    out.schema = corpus.schema;
    int id = 0;
    int next_episode_id = max_episode_id + 1;
    for (const auto& [episode_id, entries] : episodes) {
        int copies = 1;
        if (entries.front()->policy_tag == policy_tag) {
            if (rate >= 1.0) {
                copies = static_cast<int>(std::floor(rate));
                const double frac = rate - std::floor(rate);
                if (frac > 0.0 && rng.uniform() < frac) ++copies;
            } else {
                copies = (rng.uniform() < rate) ? 1 : 0;
            }
        }
        for (int c = 0; c < copies; ++c) {
            const int new_episode_id = (c == 0) ? episode_id : next_episode_id++;
            for (const CorpusEntry* e : entries) {
                CorpusEntry copy = *e;
                copy.id = id++;
                copy.episode_id = new_episode_id;
                out.entries.push_back(std::move(copy));
            }
        }
    }
    return out;
}

DecisionCorpus strip_rewards(const DecisionCorpus& corpus) {
    DecisionCorpus out;
    out.schema = corpus.schema;
    out.schema.reward_free = true;
    out.entries.reserve(corpus.entries.size());
    const int slot_in = corpus.schema.d_o + corpus.schema.d_a + (corpus.schema.reward_free ? 0 : 1);
    const int slot_out = corpus.schema.d_o + corpus.schema.d_a;
    for (const CorpusEntry& e : corpus.entries) {
        CorpusEntry s = e;
        s.value = 0.0;
        s.history.values = Vec::Zero(out.schema.M * slot_out);
        for (int j = 0; j < out.schema.M; ++j) {
            s.history.values.segment(j * slot_out, slot_out) =
                e.history.values.segment(j * slot_in, slot_out);
        }
        out.entries.push_back(std::move(s));
    }
    return out;
}

namespace {

void append_vec(std::string& s, const Vec& v) {
    s += '[';
    for (int i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt17(v(i));
    }
    s += ']';
}

Vec json_to_vec(const nlohmann::json& arr) {
    Vec v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
    return v;
}

}  // namespace

void save_corpus(const DecisionCorpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);

    nlohmann::json header = {
        {"format", "aoc-corpus"},
        {"version", corpus.schema.version},
        {"d_o", corpus.schema.d_o},
        {"d_a", corpus.schema.d_a},
        {"M", corpus.schema.M},
        {"gamma", corpus.schema.gamma},
        {"reward_free", corpus.schema.reward_free},
        {"entries", corpus.size()},
    };
    out << header.dump() << "\n";

    std::string line;
    for (const CorpusEntry& e : corpus.entries) {
        line.clear();
        line += "{\"id\":" + std::to_string(e.id);
        line += ",\"obs\":";
        append_vec(line, e.obs);
        line += ",\"action\":";
        append_vec(line, e.action);
        line += ",\"h\":";
        append_vec(line, e.history.values);
        line += ",\"mask\":";
        append_vec(line, e.history.mask);
        if (!corpus.schema.reward_free) line += ",\"v\":" + fmt17(e.value);
        line += ",\"policy_tag\":\"" + e.policy_tag + "\"";
        line += ",\"episode_id\":" + std::to_string(e.episode_id);
        line += ",\"t\":" + std::to_string(e.t);
        line += "}\n";
        out << line;
    }
    if (!out) throw Error(ErrorCategory::missing_file, "write failed: " + path);
}

DecisionCorpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::missing_file, "cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCategory::parse_error, "corpus file is empty: " + path);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::parse_error, std::string("bad corpus header: ") + e.what());
    }
    if (header.value("format", "") != "aoc-corpus") {
        throw Error(ErrorCategory::schema_mismatch, "not a corpus file: " + path);
    }

    DecisionCorpus corpus;
    try {
        corpus.schema.version = header.at("version").get<int>();
        if (corpus.schema.version != 1) {
            throw Error(ErrorCategory::schema_mismatch,
                        "unsupported corpus version " + std::to_string(corpus.schema.version));
        }
        corpus.schema.d_o = header.at("d_o").get<int>();
        corpus.schema.d_a = header.at("d_a").get<int>();
        corpus.schema.M = header.at("M").get<int>();
        corpus.schema.gamma = header.at("gamma").get<double>();
        corpus.schema.reward_free = header.at("reward_free").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::schema_mismatch, std::string("corpus header fields: ") + e.what());
    }
    const int expected = header.at("entries").get<int>();

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse_error,
                        "bad corpus line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            CorpusEntry e;
            e.id = j.at("id").get<int>();
            e.obs = json_to_vec(j.at("obs"));
            e.action = json_to_vec(j.at("action"));
            e.history.values = json_to_vec(j.at("h"));
            e.history.mask = json_to_vec(j.at("mask"));
            if (!corpus.schema.reward_free) e.value = j.at("v").get<double>();
            e.policy_tag = j.at("policy_tag").get<std::string>();
            e.episode_id = j.at("episode_id").get<int>();
            e.t = j.at("t").get<int>();

            if (e.obs.size() != corpus.schema.d_o || e.action.size() != corpus.schema.d_a ||
                e.history.values.size() != corpus.schema.history_length() ||
                e.history.mask.size() != corpus.schema.M) {
                throw Error(ErrorCategory::schema_mismatch,
                            "corpus entry shape mismatch at line " + std::to_string(line_no));
            }
            corpus.entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::parse_error,
                        "missing field on corpus line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (corpus.size() != expected) {
        throw Error(ErrorCategory::parse_error,
                    "corpus truncated: expected " + std::to_string(expected) + " entries, got " +
                        std::to_string(corpus.size()));
    }
    return corpus;
}

std::vector<double> episode_returns(const std::vector<env::Trajectory>& trajectories) {
    std::vector<double> out;
    out.reserve(trajectories.size());
    for (const env::Trajectory& traj : trajectories) {
        double sum = 0.0;
        for (const env::Transition& tr : traj) sum += tr.reward;
        out.push_back(sum);
    }
    return out;
}

}  // namespace aoc::corpus
