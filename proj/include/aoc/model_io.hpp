#pragma once

#include "aoc/corpus/corpus.hpp"
#include "aoc/nn/mlp.hpp"

#include <string>

namespace aoc {

struct ModelMeta {
    uint64_t seed = 0;
    int epochs = 0;
    double final_loss = 0.0;
    double value_mean = 0.0;
    double value_std = 1.0;
    std::string encoder = "ffn-window";
};

// Checkpoint layout: one JSON header line (architecture, schema,
// normalization constants, training metadata) followed by the flat parameter
// array in row-major layer order, one value per line, 17 significant digits.
void save_model(const std::string& path, const std::string& kind,
                const corpus::CorpusSchema& schema, const nn::Mlp& net, const ModelMeta& meta);

struct LoadedModel {
    std::string kind;
    corpus::CorpusSchema schema;
    nn::Mlp net;
    ModelMeta meta;
};

LoadedModel load_model(const std::string& path);

}  // namespace aoc
