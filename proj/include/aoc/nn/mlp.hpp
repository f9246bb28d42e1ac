#pragma once

#include "aoc/common.hpp"
#include "aoc/rng.hpp"

#include <cstdint>
#include <string>

namespace aoc::nn {

// Two tanh hidden layers, a linear projection to the embedding, and a
// strictly affine head on top. The embedding (belief) layer output is what
// the hull machinery works in; everything after it must stay affine.
struct Mlp {
    int n_in = 0;
    int hidden = 0;
    int d_b = 0;
    int d_out = 0;

    Mat W1, W2, W3, Wh;  // (hidden x n_in), (hidden x hidden), (d_b x hidden), (d_out x d_b)
    Vec b1, b2, b3, bh;

    // Per-coordinate input standardization, applied before the first layer.
    Vec in_shift, in_scale;

    void init(int n_in_, int hidden_, int d_b_, int d_out_, Rng& rng);

    Vec scale_input(const Vec& x) const;

    // Embedding of one raw input / a batch of raw inputs (rows).
    Vec embed(const Vec& x_raw) const;
    Mat embed_batch(const Mat& X_raw) const;

    Vec head(const Vec& b) const { return Wh * b + bh; }
    Mat head_batch(const Mat& B) const;

    Vec forward(const Vec& x_raw) const { return head(embed(x_raw)); }

    int param_count() const;
};

struct MlpGrads {
    Mat W1, W2, W3, Wh;
    Vec b1, b2, b3, bh;
    void zero_like(const Mlp& m);
};

// Mean over the batch of the squared error norm; X is already standardized.
double batch_loss(const Mlp& m, const Mat& X, const Mat& Y);
double batch_loss_grad(const Mlp& m, const Mat& X, const Mat& Y, MlpGrads& g);

Vec flatten_params(const Mlp& m);
void unflatten_params(Mlp& m, const Vec& theta);

struct TrainSettings {
    int hidden = 128;
    int d_b = 8;
    int batch = 500;
    int epochs = 4000;
    double lr = 1e-3;
    uint64_t seed = 0;
};

struct TrainReport {
    double final_loss = 0.0;  // full-data loss after the last epoch
    int epochs = 0;
};

// Adam with standard moment defaults. X_raw rows are raw inputs; the input
// standardization is computed here and stored in the model. Throws
// numeric_divergence with the epoch index if the loss stops being finite.
TrainReport train_mlp(Mlp& m, const Mat& X_raw, const Mat& Y, const TrainSettings& cfg);

}  // namespace aoc::nn
