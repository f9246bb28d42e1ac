#include "aoc/belief/model.hpp"
#include "aoc/env/dataset.hpp"
#include "aoc/hull/minimal_hull.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <filesystem>
#include <functional>

using namespace aoc;

namespace {

// Small synthetic corpus: random (o, a, h) features with configurable value
// labels.
corpus::DecisionCorpus synthetic_corpus(int n, int d_o, int d_a, int M, Rng& rng,
                                        const std::function<double(const Vec&)>& value_of) {
    std::vector<env::Trajectory> trajs;
    const int episode_len = 10;
    int made = 0;
    int episode = 0;
    while (made < n) {
        env::Trajectory traj;
        for (int t = 0; t < episode_len; ++t) {
            env::Transition tr;
            tr.episode_id = episode;
            tr.t = t;
            tr.obs = Vec::NullaryExpr(d_o, [&](int) { return rng.uniform(-1.0, 1.0); });
            tr.action = Vec::NullaryExpr(d_a, [&](int) { return rng.uniform(-1.0, 1.0); });
            tr.reward = rng.uniform(-1.0, 1.0);
            tr.next_obs = tr.obs;
            tr.policy_tag = "syn";
            tr.done = t + 1 == episode_len;
            traj.push_back(tr);
        }
        trajs.push_back(traj);
        made += episode_len;
        ++episode;
    }
    corpus::DecisionCorpus c = corpus::build_corpus(trajs, 0.99, M);
    for (corpus::CorpusEntry& e : c.entries) {
        e.value = value_of(corpus::flatten_entry(c.schema, e.obs, e.action, e.history));
    }
    return c;
}

}  // namespace

TEST_CASE("encode is pure and zeroed final layer returns its bias") {
    Rng rng(5);
    corpus::DecisionCorpus c =
        synthetic_corpus(200, 2, 1, 4, rng, [](const Vec& x) { return x.sum(); });
    belief::TrainConfig cfg;
    cfg.hidden = 16;
    cfg.d_b = 3;
    cfg.epochs = 5;
    cfg.batch = 64;
    cfg.seed = 1;
    belief::BeliefModel m = belief::train(c, cfg);

    const corpus::CorpusEntry& e = c.entries[7];
    const Vec b1 = m.encode(e.obs, e.action, e.history);
    const Vec b2 = m.encode(e.obs, e.action, e.history);
    CHECK(b1 == b2);

    // Zero the final encoder weights: the belief collapses to the bias.
    m.net.W3.setZero();
    m.net.b3 << 0.5, -1.0, 2.0;
    const Vec b3 = m.encode(e.obs, e.action, e.history);
    const Vec b4 = m.encode(c.entries[3].obs, c.entries[3].action, c.entries[3].history);
    CHECK((b3 - m.net.b3).norm() <= 1e-15);
    CHECK((b4 - m.net.b3).norm() <= 1e-15);
}

TEST_CASE("input perturbation is bounded by the product of layer spectral norms") {
    Rng rng(9);
    corpus::DecisionCorpus c =
        synthetic_corpus(300, 2, 1, 4, rng, [](const Vec& x) { return x.head(2).sum(); });
    belief::TrainConfig cfg;
    cfg.hidden = 24;
    cfg.d_b = 4;
    cfg.epochs = 30;
    cfg.batch = 100;
    cfg.seed = 2;
    const belief::BeliefModel m = belief::train(c, cfg);

    const auto spectral = [](const Mat& W) {
        return Eigen::JacobiSVD<Mat>(W).singularValues()(0);
    };
    // The input standardization is a diagonal layer.
    const double L = spectral(m.net.W1 * m.net.in_scale.cwiseInverse().asDiagonal()) *
                     spectral(m.net.W2) * spectral(m.net.W3);

    const corpus::CorpusEntry& e = c.entries[11];
    const Vec x = corpus::flatten_entry(c.schema, e.obs, e.action, e.history);
    const Vec b0 = m.encode_flat(x);
    for (int coord = 0; coord < x.size(); ++coord) {
        Vec xp = x;
        xp(coord) += 1e-6;
        const Vec bp = m.encode_flat(xp);
        REQUIRE((bp - b0).norm() <= L * 1e-6 + 1e-15);
    }
}

TEST_CASE("predict_value is exactly affine in the belief") {
    Rng rng(13);
    corpus::DecisionCorpus c =
        synthetic_corpus(150, 2, 1, 4, rng, [](const Vec& x) { return x(0); });
    belief::TrainConfig cfg;
    cfg.hidden = 16;
    cfg.d_b = 4;
    cfg.epochs = 5;
    cfg.batch = 64;
    cfg.seed = 3;
    const belief::BeliefModel m = belief::train(c, cfg);

    for (int trial = 0; trial < 1000; ++trial) {
        Vec b1 = Vec::NullaryExpr(4, [&](int) { return rng.uniform(-2.0, 2.0); });
        Vec b2 = Vec::NullaryExpr(4, [&](int) { return rng.uniform(-2.0, 2.0); });
        const double alpha = rng.uniform();
        const double lhs = m.predict_value(alpha * b1 + (1.0 - alpha) * b2);
        const double rhs = alpha * m.predict_value(b1) + (1.0 - alpha) * m.predict_value(b2);
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }

    // Direct dot-product cross-check.
    Vec b = Vec::NullaryExpr(4, [&](int) { return rng.uniform(-2.0, 2.0); });
    double dot = m.net.bh(0);
    for (int i = 0; i < 4; ++i) dot += m.net.Wh(0, i) * b(i);
    CHECK(m.predict_value(b) == doctest::Approx(dot).epsilon(1e-15));
}

TEST_CASE("training fits a linear target and a constant target") {
    Rng rng(17);
    Vec u;
    corpus::DecisionCorpus c = synthetic_corpus(600, 2, 1, 4, rng, [&](const Vec& x) {
        if (u.size() == 0) {
            u = Vec::NullaryExpr(x.size(), [&](int) { return rng.uniform(-1.0, 1.0); });
        }
        return u.dot(x);
    });
    belief::TrainConfig cfg;
    cfg.hidden = 64;
    cfg.d_b = 6;
    cfg.epochs = 600;
    cfg.batch = 200;
    cfg.seed = 4;
    const belief::BeliefModel linear_fit = belief::train(c, cfg);
    CHECK(linear_fit.meta.final_loss <= 1e-3);

    corpus::DecisionCorpus c2 =
        synthetic_corpus(300, 2, 1, 4, rng, [](const Vec&) { return 3.25; });
    belief::TrainConfig cfg2 = cfg;
    cfg2.epochs = 200;
    const belief::BeliefModel const_fit = belief::train(c2, cfg2);
    CHECK(const_fit.meta.final_loss <= 1e-6);
    CHECK(const_fit.predict_value(Vec::Zero(6)) == doctest::Approx(3.25).epsilon(1e-3));
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(21);
    const int n_in = 9, B = 10;
    Mat X(B, n_in), Y(B, 1);
    for (int i = 0; i < B; ++i) {
        for (int j = 0; j < n_in; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
        Y(i, 0) = rng.uniform(-1.0, 1.0);
    }
    nn::Mlp m;
    Rng init_rng(22);
    m.init(n_in, 8, 3, 1, init_rng);

    nn::MlpGrads grads;
    grads.zero_like(m);
    nn::batch_loss_grad(m, X, Y, grads);
    Vec g(m.param_count());
    {
        nn::Mlp tmp = m;
        // flatten via the same order as flatten_params
        nn::Mlp gm = m;
        gm.W1 = grads.W1;
        gm.b1 = grads.b1;
        gm.W2 = grads.W2;
        gm.b2 = grads.b2;
        gm.W3 = grads.W3;
        gm.b3 = grads.b3;
        gm.Wh = grads.Wh;
        gm.bh = grads.bh;
        g = nn::flatten_params(gm);
    }

    Vec theta = nn::flatten_params(m);
    const double h = 1e-5;
    for (int p = 0; p < theta.size(); ++p) {
        Vec tp = theta, tm = theta;
        tp(p) += h;
        tm(p) -= h;
        nn::Mlp mp = m, mm = m;
        nn::unflatten_params(mp, tp);
        nn::unflatten_params(mm, tm);
        const double fd = (nn::batch_loss(mp, X, Y) - nn::batch_loss(mm, X, Y)) / (2.0 * h);
        const double scale = std::max({1e-6, std::abs(fd), std::abs(g(p))});
        REQUIRE(std::abs(g(p) - fd) / scale <= 1e-4);
    }
}

TEST_CASE("training divergence raises with the epoch index") {
    Rng rng(31);
    corpus::DecisionCorpus c =
        synthetic_corpus(100, 2, 1, 4, rng, [](const Vec& x) { return x(0); });
    belief::TrainConfig cfg;
    cfg.hidden = 8;
    cfg.d_b = 2;
    cfg.epochs = 50;
    cfg.batch = 50;
    cfg.lr = 1e290;  // guaranteed blow-up
    cfg.seed = 5;
    CHECK_THROWS_AS(belief::train(c, cfg), Error);
}

TEST_CASE("operator norm equals the Euclidean norm of the head weights") {
    Rng rng(37);
    corpus::DecisionCorpus c =
        synthetic_corpus(120, 2, 1, 4, rng, [](const Vec& x) { return x(1); });
    belief::TrainConfig cfg;
    cfg.hidden = 8;
    cfg.d_b = 2;
    cfg.epochs = 5;
    cfg.batch = 60;
    cfg.seed = 6;
    belief::BeliefModel m = belief::train(c, cfg);

    m.net.Wh(0, 0) = 3.0;
    m.net.Wh(0, 1) = 4.0;
    CHECK(m.operator_norm() == doctest::Approx(5.0).epsilon(1e-15));
    m.net.Wh.setZero();
    CHECK(m.operator_norm() == 0.0);

    // Sampling check: |w.u| <= ||w|| over unit vectors, tight at u = w/||w||.
    Rng rng2(38);
    m.net.Wh(0, 0) = rng2.uniform(-2.0, 2.0);
    m.net.Wh(0, 1) = rng2.uniform(-2.0, 2.0);
    const double norm = m.operator_norm();
    double best = 0.0;
    for (int i = 0; i < 10000; ++i) {
        Vec u(2);
        u << rng2.normal(), rng2.normal();
        u.normalize();
        const double v = std::abs(m.net.Wh.row(0).dot(u));
        REQUIRE(v <= norm + 1e-12);
        best = std::max(best, v);
    }
    CHECK(best >= norm - 1e-3);
}

TEST_CASE("embedding cache rows equal per-entry encodes") {
    Rng rng(41);
    corpus::DecisionCorpus c =
        synthetic_corpus(150, 2, 1, 4, rng, [](const Vec& x) { return x(0) * x(1); });
    belief::TrainConfig cfg;
    cfg.hidden = 16;
    cfg.d_b = 3;
    cfg.epochs = 10;
    cfg.batch = 75;
    cfg.seed = 7;
    const belief::BeliefModel m = belief::train(c, cfg);
    const Mat cache = belief::embed_corpus(m, c);
    REQUIRE(cache.rows() == c.size());
    for (int i : {0, 3, 77, 149}) {
        const corpus::CorpusEntry& e = c.entries[static_cast<size_t>(i)];
        const Vec b = m.encode(e.obs, e.action, e.history);
        REQUIRE((cache.row(i).transpose() - b).norm() <= 1e-14);
    }
}

TEST_CASE("checkpoint save/load round-trips the model") {
    Rng rng(43);
    corpus::DecisionCorpus c =
        synthetic_corpus(100, 2, 1, 4, rng, [](const Vec& x) { return x(2); });
    belief::TrainConfig cfg;
    cfg.hidden = 12;
    cfg.d_b = 3;
    cfg.epochs = 8;
    cfg.batch = 50;
    cfg.seed = 8;
    const belief::BeliefModel m = belief::train(c, cfg);
    const std::string path = "test_belief_model.aoc";
    m.save(path);
    const belief::BeliefModel loaded = belief::BeliefModel::load(path);

    const corpus::CorpusEntry& e = c.entries[31];
    const Vec b0 = m.encode(e.obs, e.action, e.history);
    const Vec b1 = loaded.encode(e.obs, e.action, e.history);
    CHECK((b0 - b1).norm() <= 1e-16);
    CHECK(loaded.meta.final_loss == m.meta.final_loss);
    CHECK(loaded.schema.compatible(c.schema));
    std::filesystem::remove(path);
}

TEST_CASE("estimation bound holds end to end on hull projections") {
    Rng rng(47);
    corpus::DecisionCorpus c =
        synthetic_corpus(400, 2, 1, 4, rng, [](const Vec& x) { return std::sin(x(0)) + x(1); });
    belief::TrainConfig cfg;
    cfg.hidden = 24;
    cfg.d_b = 3;
    cfg.epochs = 40;
    cfg.batch = 200;
    cfg.seed = 9;
    const belief::BeliefModel m = belief::train(c, cfg);
    const hull::BeliefCache cache = hull::BeliefCache::from_corpus(m, c);

    for (int trial = 0; trial < 1000; ++trial) {
        Vec b_t = Vec::NullaryExpr(3, [&](int) { return rng.uniform(-3.0, 3.0); });
        const auto dec = hull::minimal_hull(cache, b_t, 3);
        const double lhs = std::abs(m.predict_value(dec.projected) - m.predict_value(b_t));
        REQUIRE(lhs <= m.operator_norm() * dec.residual + 1e-9);
    }
}
