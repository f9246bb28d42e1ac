#include "aoc/hull/cache.hpp"
#include "aoc/hull/geometry.hpp"
#include "aoc/hull/kdtree.hpp"
#include "aoc/hull/minimal_hull.hpp"
#include "aoc/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace aoc;
using namespace aoc::hull;

namespace {

Mat rows(std::initializer_list<std::initializer_list<double>> data) {
    const int m = static_cast<int>(data.size());
    const int d = static_cast<int>(data.begin()->size());
    Mat P(m, d);
    int i = 0;
    for (const auto& row : data) {
        int j = 0;
        for (double v : row) P(i, j++) = v;
        ++i;
    }
    return P;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

BeliefCache cache_of(const Mat& beliefs) {
    Vec values = Vec::LinSpaced(beliefs.rows(), 0.0, 1.0);
    return BeliefCache(beliefs, values, Mat(), {});
}

}  // namespace

TEST_CASE("simplex_project: barycentric interior point") {
    const Mat P = rows({{0, 0}, {1, 0}, {0, 1}});
    const auto res = simplex_project(P, vec2(0.25, 0.25));
    CHECK(res.residual == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.weights(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.weights(1) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(res.weights(2) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("simplex_project: exterior point lands on an endpoint") {
    const Mat P = rows({{0, 0}, {1, 0}});
    const auto res = simplex_project(P, vec2(2.0, 0.0));
    CHECK(res.weights(0) == doctest::Approx(0.0));
    CHECK(res.weights(1) == doctest::Approx(1.0));
    CHECK(res.residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simplex_project: exterior point onto an edge, grid-confirmed") {
    const Mat P = rows({{0, 0}, {2, 0}, {0, 2}});
    const Vec q = vec2(2.0, 2.0);
    const auto res = simplex_project(P, q);
    CHECK(res.point(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.point(1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.weights(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.weights(1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.weights(2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.residual == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

    // Dense grid over the simplex confirms the optimum.
    double best = 1e300;
    const int G = 300;
    for (int i = 0; i <= G; ++i) {
        for (int j = 0; j + i <= G; ++j) {
            const double w1 = static_cast<double>(i) / G;
            const double w2 = static_cast<double>(j) / G;
            const double w0 = 1.0 - w1 - w2;
            const Vec p = w0 * P.row(0).transpose() + w1 * P.row(1).transpose() +
                          w2 * P.row(2).transpose();
            best = std::min(best, (p - q).norm());
        }
    }
    CHECK(res.residual <= best + 1e-6);
}

TEST_CASE("simplex_project: random instances beat a Monte-Carlo oracle and satisfy KKT") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const int d = 2 + trial % 3;        // 2..4
        const int m = 2 + (trial * 7) % 7;  // 2..8
        Mat P(m, d);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < d; ++j) P(i, j) = rng.uniform(-2.0, 2.0);
        }
        Vec q(d);
        for (int j = 0; j < d; ++j) q(j) = rng.uniform(-3.0, 3.0);

        const auto res = simplex_project(P, q);
        REQUIRE(res.weights.minCoeff() >= 0.0);
        REQUIRE(std::abs(res.weights.sum() - 1.0) <= 1e-9);
        REQUIRE(kkt_min_directional(P, q, res.weights) >= -1e-8);

        // Monte-Carlo lower bound: random simplex points.
        double best = 1e300;
        for (int s = 0; s < 2000; ++s) {
            Vec w(m);
            for (int i = 0; i < m; ++i) w(i) = -std::log(1.0 - rng.uniform());
            w /= w.sum();
            best = std::min(best, (P.transpose() * w - q).norm());
        }
        REQUIRE(res.residual <= best + 1e-9);
    }
}

TEST_CASE("affine independence") {
    CHECK(affine_independent(rows({{0, 0}, {1, 0}, {0, 1}})));
    CHECK_FALSE(affine_independent(rows({{0, 0}, {1, 1}, {2, 2}})));
    CHECK_FALSE(affine_independent(rows({{0, 0}, {1, 0}, {0, 1}, {0.3, 0.3}})));  // m > d+1
    CHECK(affine_independent(rows({{5, 5}})));
}

TEST_CASE("simplex volume") {
    CHECK(simplex_volume(rows({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
    CHECK(simplex_volume(rows({{0, 0}, {1, 1}, {2, 2}})) == doctest::Approx(0.0));
    Mat tetrahedron(4, 3);
    tetrahedron << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
    CHECK(simplex_volume(tetrahedron) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("caratheodory reduction keeps the combination point") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 3;
        const int m = d + 2 + trial % 3;  // affinely dependent for sure
        Mat P(m, d);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < d; ++j) P(i, j) = rng.uniform(-1.0, 1.0);
        }
        Vec w(m);
        for (int i = 0; i < m; ++i) w(i) = rng.uniform(0.01, 1.0);
        w /= w.sum();
        const Vec point = P.transpose() * w;

        Vec w2 = w;
        const auto kept = caratheodory_reduce(P, w2);
        REQUIRE(static_cast<int>(kept.size()) <= d + 1);
        Mat sub(static_cast<int>(kept.size()), d);
        for (size_t i = 0; i < kept.size(); ++i) sub.row(static_cast<int>(i)) = P.row(kept[i]);
        REQUIRE(affine_independent(sub));
        REQUIRE(w2.minCoeff() >= 0.0);
        REQUIRE(std::abs(w2.sum() - 1.0) <= 1e-9);
        REQUIRE((sub.transpose() * w2 - point).norm() <= 1e-8);
    }
}

TEST_CASE("kd-tree agrees with brute force over random queries") {
    Rng rng(31);
    const int n = 500, d = 4;
    Mat points(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) points(i, j) = rng.uniform(-1.0, 1.0);
    }
    // Duplicate some rows to exercise distance ties.
    for (int i = 0; i < 50; ++i) points.row(n - 1 - i) = points.row(i);
    const KdTree tree(points);

    for (int trial = 0; trial < 10000; ++trial) {
        Vec q(d);
        for (int j = 0; j < d; ++j) q(j) = rng.uniform(-1.2, 1.2);
        const int k = 1 + trial % 12;

        std::vector<std::pair<double, int>> brute;
        for (int i = 0; i < n; ++i) {
            brute.push_back({(points.row(i).transpose() - q).squaredNorm(), i});
        }
        std::sort(brute.begin(), brute.end());
        const auto got = tree.knn(q, k);
        REQUIRE(static_cast<int>(got.size()) == k);
        for (int i = 0; i < k; ++i) REQUIRE(got[static_cast<size_t>(i)] == brute[static_cast<size_t>(i)].second);
    }
}

TEST_CASE("cache knn: examples from the contract") {
    const Mat beliefs = rows({{0, 0}, {1, 0}, {5, 5}});
    const BeliefCache cache = cache_of(beliefs);
    const auto two = cache.knn(vec2(0.1, 0.0), 2);
    CHECK(two == std::vector<int>{0, 1});
    const auto all = cache.knn(vec2(0.1, 0.0), 3);
    CHECK(all == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(cache.knn(vec2(0, 0), 4), Error);
}

TEST_CASE("minimal_hull picks the smallest containing simplex") {
    const Mat beliefs = rows({{0, 0}, {1, 0}, {0, 1}, {5, 5}});
    const BeliefCache cache = cache_of(beliefs);
    const auto dec = minimal_hull(cache, vec2(0.2, 0.2), 2);
    REQUIRE(dec.support == std::vector<int>{0, 1, 2});
    CHECK(dec.weights(0) == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(dec.weights(1) == doctest::Approx(0.2).epsilon(1e-8));
    CHECK(dec.weights(2) == doctest::Approx(0.2).epsilon(1e-8));
    CHECK(dec.residual <= 1e-9);
    CHECK(dec.contained);
    CHECK(dec.mode == HullMode::Enumeration);
}

TEST_CASE("minimal_hull: query equal to a cache point degenerates to it") {
    const Mat beliefs = rows({{0, 0}, {1, 0}, {0, 1}, {0.3, 0.4}});
    const BeliefCache cache = cache_of(beliefs);
    const auto dec = minimal_hull(cache, vec2(0.3, 0.4), 2);
    REQUIRE(dec.support == std::vector<int>{3});
    CHECK(dec.weights(0) == doctest::Approx(1.0));
    CHECK(dec.residual <= 1e-12);
}

TEST_CASE("minimal_hull far outside: residual equals hull distance (grid oracle)") {
    Rng rng(53);
    Mat beliefs(8, 2);
    for (int i = 0; i < 8; ++i) {
        beliefs(i, 0) = rng.uniform(-1.0, 1.0);
        beliefs(i, 1) = rng.uniform(-1.0, 1.0);
    }
    const BeliefCache cache = cache_of(beliefs);
    const Vec q = vec2(4.0, -3.0);
    const auto dec = minimal_hull(cache, q, 2, 8);

    // Dense oracle: min distance over convex combinations of ALL subsets of
    // size 3 on a fine grid.
    double best = 1e300;
    const int G = 120;
    for (int a = 0; a < 8; ++a) {
        for (int b = a + 1; b < 8; ++b) {
            for (int c = b + 1; c < 8; ++c) {
                for (int i = 0; i <= G; ++i) {
                    for (int j = 0; j + i <= G; ++j) {
                        const double w1 = static_cast<double>(i) / G;
                        const double w2 = static_cast<double>(j) / G;
                        const double w0 = 1.0 - w1 - w2;
                        const Vec p = w0 * beliefs.row(a).transpose() +
                                      w1 * beliefs.row(b).transpose() +
                                      w2 * beliefs.row(c).transpose();
                        best = std::min(best, (p - q).norm());
                    }
                }
            }
        }
    }
    CHECK(dec.residual == doctest::Approx(best).epsilon(1e-4));
    CHECK(dec.residual <= best + 1e-6);
    CHECK_FALSE(dec.contained);
}

TEST_CASE("decompose_or_reject: generate-and-recover with strictly positive weights") {
    Rng rng(67);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 3;
        Mat support(d + 1, d);
        // Keep points well separated so the support is affinely independent.
        do {
            for (int i = 0; i <= d; ++i) {
                for (int j = 0; j < d; ++j) support(i, j) = rng.uniform(-1.0, 1.0);
            }
        } while (!affine_independent(support) || simplex_volume(support) < 0.05);

        Vec w(d + 1);
        for (int i = 0; i <= d; ++i) w(i) = rng.uniform(0.15, 1.0);
        w /= w.sum();
        const Vec q = support.transpose() * w;

        // Pad the cache with points far away so knn keeps the support.
        Mat beliefs(d + 1 + 4, d);
        beliefs.topRows(d + 1) = support;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < d; ++j) beliefs(d + 1 + i, j) = rng.uniform(8.0, 12.0);
        }
        const BeliefCache cache = cache_of(beliefs);
        const auto dec = decompose_or_reject(cache, q, d);
        REQUIRE(dec.residual <= 1e-7);

        // Recovered weights must match the generating ones on the support.
        Vec recovered = Vec::Zero(d + 1);
        for (size_t i = 0; i < dec.support.size(); ++i) {
            REQUIRE(dec.support[i] <= d);
            recovered(dec.support[i]) = dec.weights(static_cast<int>(i));
        }
        REQUIRE((recovered - w).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("projection onto a convex set is unique regardless of enumeration order") {
    Rng rng(71);
    Mat beliefs(10, 3);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 3; ++j) beliefs(i, j) = rng.uniform(-1.0, 1.0);
    }
    // Same point set in reversed storage order: enumeration visits subsets in
    // a different sequence, the projected point must not move.
    Mat reversed(10, 3);
    for (int i = 0; i < 10; ++i) reversed.row(i) = beliefs.row(9 - i);

    const BeliefCache cache = cache_of(beliefs);
    const BeliefCache cache_rev = cache_of(reversed);
    Vec q(3);
    q << 3.0, 3.0, 3.0;
    const auto a = minimal_hull(cache, q, 3, 10);
    const auto b = minimal_hull(cache_rev, q, 3, 10);
    CHECK((a.projected - b.projected).norm() <= 1e-6);
    CHECK(a.residual == doctest::Approx(b.residual).epsilon(1e-9));
}

TEST_CASE("volume monotonicity: minimal hull has the smallest containing volume") {
    Rng rng(83);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 3;  // 2..4
        const int n = 12;
        Mat beliefs(n, d);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) beliefs(i, j) = rng.uniform(-1.0, 1.0);
        }
        const BeliefCache cache = cache_of(beliefs);
        Vec q(d);
        for (int j = 0; j < d; ++j) q(j) = rng.uniform(-0.3, 0.3);

        const auto dec = minimal_hull(cache, q, d, n);
        if (!dec.contained) continue;

        double dec_vol = 0.0;
        if (static_cast<int>(dec.support.size()) == d + 1) {
            Mat pts(d + 1, d);
            for (size_t i = 0; i < dec.support.size(); ++i) {
                pts.row(static_cast<int>(i)) = beliefs.row(dec.support[i]);
            }
            dec_vol = simplex_volume(pts);
        }

        // Exhaustive check over all (d+1)-subsets of the entire cache.
        std::vector<int> comb(static_cast<size_t>(d + 1));
        std::iota(comb.begin(), comb.end(), 0);
        while (true) {
            Mat pts(d + 1, d);
            for (int i = 0; i <= d; ++i) pts.row(i) = beliefs.row(comb[static_cast<size_t>(i)]);
            const auto proj = simplex_project(pts, q);
            if (proj.residual <= 1e-7) {
                REQUIRE(dec_vol <= simplex_volume(pts) + 1e-9);
            }
            int i = d;
            while (i >= 0 && comb[static_cast<size_t>(i)] == n - (d + 1) + i) --i;
            if (i < 0) break;
            ++comb[static_cast<size_t>(i)];
            for (int j = i + 1; j <= d; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
        }
    }
}

TEST_CASE("heuristic mode reports itself and stays residual-sane") {
    Rng rng(91);
    const int d = 9;  // above the enumeration threshold
    Mat beliefs(60, d);
    for (int i = 0; i < 60; ++i) {
        for (int j = 0; j < d; ++j) beliefs(i, j) = rng.uniform(-1.0, 1.0);
    }
    const BeliefCache cache = cache_of(beliefs);
    Vec q = Vec::Zero(d);
    const auto dec = minimal_hull(cache, q, d, 60);
    CHECK(dec.mode == HullMode::Heuristic);
    CHECK(dec.weights.minCoeff() >= 0.0);
    CHECK(std::abs(dec.weights.sum() - 1.0) <= 1e-9);
    // The heuristic starts from the projection over the same 60 neighbors,
    // so its residual can never be worse.
    const auto full = simplex_project(beliefs, q);
    CHECK(dec.residual <= full.residual + 1e-6);
}
