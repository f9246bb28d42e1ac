#include "aoc/model_io.hpp"

#include <json.hpp>

#include <fstream>

namespace aoc {

namespace {

nlohmann::json vec_to_json(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vec json_to_vec(const nlohmann::json& arr) {
    Vec v(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
    return v;
}

}  // namespace

void save_model(const std::string& path, const std::string& kind,
                const corpus::CorpusSchema& schema, const nn::Mlp& net, const ModelMeta& meta) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);

    nlohmann::json header = {
        {"format", "aoc-model"},
        {"version", 1},
        {"kind", kind},
        {"encoder", meta.encoder},
        {"n_in", net.n_in},
        {"hidden", net.hidden},
        {"d_b", net.d_b},
        {"d_out", net.d_out},
        {"params", net.param_count()},
        {"schema",
         {{"d_o", schema.d_o},
          {"d_a", schema.d_a},
          {"M", schema.M},
          {"gamma", schema.gamma},
          {"reward_free", schema.reward_free}}},
        {"in_shift", vec_to_json(net.in_shift)},
        {"in_scale", vec_to_json(net.in_scale)},
        {"value_mean", meta.value_mean},
        {"value_std", meta.value_std},
        {"seed", meta.seed},
        {"epochs", meta.epochs},
        {"final_loss", meta.final_loss},
    };
    out << header.dump() << "\n";

    const Vec theta = nn::flatten_params(net);
    for (int i = 0; i < theta.size(); ++i) out << fmt17(theta(i)) << "\n";
    if (!out) throw Error(ErrorCategory::missing_file, "write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::missing_file, "cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCategory::parse_error, "model file is empty: " + path);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::parse_error, std::string("bad model header: ") + e.what());
    }
    if (header.value("format", "") != "aoc-model" || header.value("version", 0) != 1) {
        throw Error(ErrorCategory::schema_mismatch, "not a supported model file: " + path);
    }

    LoadedModel out;
    try {
        out.kind = header.at("kind").get<std::string>();
        out.net.n_in = header.at("n_in").get<int>();
        out.net.hidden = header.at("hidden").get<int>();
        out.net.d_b = header.at("d_b").get<int>();
        out.net.d_out = header.at("d_out").get<int>();
        const auto& s = header.at("schema");
        out.schema.d_o = s.at("d_o").get<int>();
        out.schema.d_a = s.at("d_a").get<int>();
        out.schema.M = s.at("M").get<int>();
        out.schema.gamma = s.at("gamma").get<double>();
        out.schema.reward_free = s.at("reward_free").get<bool>();
        out.net.in_shift = json_to_vec(header.at("in_shift"));
        out.net.in_scale = json_to_vec(header.at("in_scale"));
        out.meta.value_mean = header.at("value_mean").get<double>();
        out.meta.value_std = header.at("value_std").get<double>();
        out.meta.seed = header.at("seed").get<uint64_t>();
        out.meta.epochs = header.at("epochs").get<int>();
        out.meta.final_loss = header.at("final_loss").get<double>();
        out.meta.encoder = header.at("encoder").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::schema_mismatch, std::string("model header fields: ") + e.what());
    }

    nn::Mlp& net = out.net;
    net.W1 = Mat::Zero(net.hidden, net.n_in);
    net.b1 = Vec::Zero(net.hidden);
    net.W2 = Mat::Zero(net.hidden, net.hidden);
    net.b2 = Vec::Zero(net.hidden);
    net.W3 = Mat::Zero(net.d_b, net.hidden);
    net.b3 = Vec::Zero(net.d_b);
    net.Wh = Mat::Zero(net.d_out, net.d_b);
    net.bh = Vec::Zero(net.d_out);

    const int expected = header.at("params").get<int>();
    if (expected != net.param_count()) {
        throw Error(ErrorCategory::schema_mismatch, "model header parameter count mismatch");
    }
    Vec theta(expected);
    int got = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (got >= expected) {
            throw Error(ErrorCategory::parse_error, "model file has extra parameters");
        }
        try {
            theta(got++) = std::stod(line);
        } catch (const std::exception&) {
            throw Error(ErrorCategory::parse_error, "bad parameter at index " + std::to_string(got));
        }
    }
    if (got != expected) {
        throw Error(ErrorCategory::parse_error,
                    "model truncated: expected " + std::to_string(expected) + " parameters, got " +
                        std::to_string(got));
    }
    nn::unflatten_params(net, theta);
    return out;
}

}  // namespace aoc
