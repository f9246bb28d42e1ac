#include "aoc/nn/mlp.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace aoc::nn {

namespace {

Mat xavier(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-bound, bound);
    }
    return m;
}

}  // namespace

void Mlp::init(int n_in_, int hidden_, int d_b_, int d_out_, Rng& rng) {
    n_in = n_in_;
    hidden = hidden_;
    d_b = d_b_;
    d_out = d_out_;
    W1 = xavier(hidden, n_in, rng);
    b1 = Vec::Zero(hidden);
    W2 = xavier(hidden, hidden, rng);
    b2 = Vec::Zero(hidden);
    W3 = xavier(d_b, hidden, rng);
    b3 = Vec::Zero(d_b);
    Wh = xavier(d_out, d_b, rng);
    bh = Vec::Zero(d_out);
    in_shift = Vec::Zero(n_in);
    in_scale = Vec::Ones(n_in);
}

Vec Mlp::scale_input(const Vec& x) const {
    return (x - in_shift).cwiseQuotient(in_scale);
}

Vec Mlp::embed(const Vec& x_raw) const {
    if (x_raw.size() != n_in) {
        throw Error(ErrorCategory::schema_mismatch, "Mlp::embed: input length mismatch");
    }
    const Vec x = scale_input(x_raw);
    const Vec a1 = (W1 * x + b1).array().tanh();
    const Vec a2 = (W2 * a1 + b2).array().tanh();
    return W3 * a2 + b3;
}

Mat Mlp::embed_batch(const Mat& X_raw) const {
    if (X_raw.cols() != n_in) {
        throw Error(ErrorCategory::schema_mismatch, "Mlp::embed_batch: input width mismatch");
    }
    Mat X = (X_raw.rowwise() - in_shift.transpose()).array().rowwise() /
            in_scale.transpose().array();
    Mat A1 = ((X * W1.transpose()).rowwise() + b1.transpose()).array().tanh();
    Mat A2 = ((A1 * W2.transpose()).rowwise() + b2.transpose()).array().tanh();
    return (A2 * W3.transpose()).rowwise() + b3.transpose();
}

Mat Mlp::head_batch(const Mat& B) const {
    return (B * Wh.transpose()).rowwise() + bh.transpose();
}

int Mlp::param_count() const {
    return static_cast<int>(W1.size() + b1.size() + W2.size() + b2.size() + W3.size() +
                            b3.size() + Wh.size() + bh.size());
}

void MlpGrads::zero_like(const Mlp& m) {
    W1 = Mat::Zero(m.W1.rows(), m.W1.cols());
    W2 = Mat::Zero(m.W2.rows(), m.W2.cols());
    W3 = Mat::Zero(m.W3.rows(), m.W3.cols());
    Wh = Mat::Zero(m.Wh.rows(), m.Wh.cols());
    b1 = Vec::Zero(m.b1.size());
    b2 = Vec::Zero(m.b2.size());
    b3 = Vec::Zero(m.b3.size());
    bh = Vec::Zero(m.bh.size());
}

double batch_loss(const Mlp& m, const Mat& X, const Mat& Y) {
    Mat A1 = ((X * m.W1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
    Mat A2 = ((A1 * m.W2.transpose()).rowwise() + m.b2.transpose()).array().tanh();
    Mat B = (A2 * m.W3.transpose()).rowwise() + m.b3.transpose();
    Mat E = ((B * m.Wh.transpose()).rowwise() + m.bh.transpose()) - Y;
    return E.squaredNorm() / static_cast<double>(X.rows());
}

double batch_loss_grad(const Mlp& m, const Mat& X, const Mat& Y, MlpGrads& g) {
    const double n = static_cast<double>(X.rows());
    Mat A1 = ((X * m.W1.transpose()).rowwise() + m.b1.transpose()).array().tanh();
    Mat A2 = ((A1 * m.W2.transpose()).rowwise() + m.b2.transpose()).array().tanh();
    Mat B = (A2 * m.W3.transpose()).rowwise() + m.b3.transpose();
    Mat E = ((B * m.Wh.transpose()).rowwise() + m.bh.transpose()) - Y;
    const double loss = E.squaredNorm() / n;

    Mat dY = E * (2.0 / n);
    g.Wh = dY.transpose() * B;
    g.bh = dY.colwise().sum();
    Mat dB = dY * m.Wh;
    g.W3 = dB.transpose() * A2;
    g.b3 = dB.colwise().sum();
    Mat dZ2 = (dB * m.W3).array() * (1.0 - A2.array().square());
    g.W2 = dZ2.transpose() * A1;
    g.b2 = dZ2.colwise().sum();
    Mat dZ1 = (dZ2 * m.W2).array() * (1.0 - A1.array().square());
    g.W1 = dZ1.transpose() * X;
    g.b1 = dZ1.colwise().sum();
    return loss;
}

namespace {

void copy_out(Vec& theta, int& off, const Mat& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) theta(off++) = m(i, j);
    }
}
void copy_out(Vec& theta, int& off, const Vec& v) {
    for (int i = 0; i < v.size(); ++i) theta(off++) = v(i);
}
void copy_in(const Vec& theta, int& off, Mat& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) m(i, j) = theta(off++);
    }
}
void copy_in(const Vec& theta, int& off, Vec& v) {
    for (int i = 0; i < v.size(); ++i) v(i) = theta(off++);
}

}  // namespace

Vec flatten_params(const Mlp& m) {
    Vec theta(m.param_count());
    int off = 0;
    copy_out(theta, off, m.W1);
    copy_out(theta, off, m.b1);
    copy_out(theta, off, m.W2);
    copy_out(theta, off, m.b2);
    copy_out(theta, off, m.W3);
    copy_out(theta, off, m.b3);
    copy_out(theta, off, m.Wh);
    copy_out(theta, off, m.bh);
    return theta;
}

void unflatten_params(Mlp& m, const Vec& theta) {
    if (theta.size() != m.param_count()) {
        throw Error(ErrorCategory::schema_mismatch, "unflatten_params: size mismatch");
    }
    int off = 0;
    copy_in(theta, off, m.W1);
    copy_in(theta, off, m.b1);
    copy_in(theta, off, m.W2);
    copy_in(theta, off, m.b2);
    copy_in(theta, off, m.W3);
    copy_in(theta, off, m.b3);
    copy_in(theta, off, m.Wh);
    copy_in(theta, off, m.bh);
}

namespace {

struct AdamState {
    Vec m, v;
    explicit AdamState(int n) : m(Vec::Zero(n)), v(Vec::Zero(n)) {}
};

}  // namespace

TrainReport train_mlp(Mlp& model, const Mat& X_raw, const Mat& Y, const TrainSettings& cfg) {
    const int n = static_cast<int>(X_raw.rows());
    if (n == 0) throw Error(ErrorCategory::invalid_argument, "train_mlp: empty data");

    Rng rng(Rng::derive(cfg.seed, 0x6d6c70));
    model.init(static_cast<int>(X_raw.cols()), cfg.hidden, cfg.d_b, static_cast<int>(Y.cols()), rng);

    model.in_shift = X_raw.colwise().mean();
    for (int j = 0; j < model.n_in; ++j) {
        const double var = (X_raw.col(j).array() - model.in_shift(j)).square().mean();
        model.in_scale(j) = std::max(std::sqrt(var), 1e-8);
    }
    Mat X = (X_raw.rowwise() - model.in_shift.transpose()).array().rowwise() /
            model.in_scale.transpose().array();

    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    Vec theta = flatten_params(model);
    AdamState adam(static_cast<int>(theta.size()));
    MlpGrads grads;
    grads.zero_like(model);

    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    const int batch = std::min(cfg.batch, n);
    long step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(rng.uniform_int(0, i))]);
        }
        for (int begin = 0; begin < n; begin += batch) {
            const int b = std::min(batch, n - begin);
            Mat Xb(b, model.n_in), Yb(b, model.d_out);
            for (int r = 0; r < b; ++r) {
                Xb.row(r) = X.row(perm[static_cast<size_t>(begin + r)]);
                Yb.row(r) = Y.row(perm[static_cast<size_t>(begin + r)]);
            }
            const double loss = batch_loss_grad(model, Xb, Yb, grads);
            if (!std::isfinite(loss)) {
                throw Error(ErrorCategory::numeric_divergence,
                            "training diverged at epoch " + std::to_string(epoch));
            }
            Vec g(theta.size());
            int off = 0;
            copy_out(g, off, grads.W1);
            copy_out(g, off, grads.b1);
            copy_out(g, off, grads.W2);
            copy_out(g, off, grads.b2);
            copy_out(g, off, grads.W3);
            copy_out(g, off, grads.b3);
            copy_out(g, off, grads.Wh);
            copy_out(g, off, grads.bh);

            ++step;
            adam.m = beta1 * adam.m + (1.0 - beta1) * g;
            adam.v = beta2 * adam.v.array() + (1.0 - beta2) * g.array().square();
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            theta.array() -=
                cfg.lr * (adam.m.array() / c1) / ((adam.v.array() / c2).sqrt() + eps);
            unflatten_params(model, theta);
        }
    }

    TrainReport report;
    report.epochs = cfg.epochs;
    report.final_loss = batch_loss(model, X, Y);
    if (!std::isfinite(report.final_loss)) {
        throw Error(ErrorCategory::numeric_divergence, "training produced non-finite final loss");
    }
    return report;
}

}  // namespace aoc::nn
