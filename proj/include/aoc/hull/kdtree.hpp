#pragma once

#include "aoc/common.hpp"

#include <vector>

namespace aoc::hull {

// Exact k-nearest-neighbor index over the rows of a point matrix. Ties on
// distance break toward the lower row id, matching a brute-force
// (distance, id) sort. The tree owns a copy of the points, so the index
// stays valid when its owner moves.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(const Mat& points) { build(points); }

    void build(const Mat& points);

    // Row ids of the k nearest points to q, ascending by (distance, id).
    std::vector<int> knn(const Vec& q, int k) const;

    int size() const { return static_cast<int>(points_.rows()); }

private:
    struct Node {
        int axis = -1;       // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into index_
    };

    int build_node(int begin, int end);
    void query(int node, const Vec& q, int k,
               std::vector<std::pair<double, int>>& heap) const;

    Mat points_;
    std::vector<int> index_;
    std::vector<Node> nodes_;
    int root_ = -1;

    static constexpr int kLeafSize = 16;
};

}  // namespace aoc::hull
