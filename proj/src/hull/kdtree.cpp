#include "aoc/hull/kdtree.hpp"

#include <algorithm>
#include <limits>

namespace aoc::hull {

void KdTree::build(const Mat& points) {
    points_ = points;
    index_.resize(static_cast<size_t>(points_.rows()));
    for (size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<int>(i);
    nodes_.clear();
    nodes_.reserve(static_cast<size_t>(2 * points_.rows() / kLeafSize + 8));
    root_ = points_.rows() > 0 ? build_node(0, static_cast<int>(points_.rows())) : -1;
}

int KdTree::build_node(int begin, int end) {
    const Mat& points = points_;
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    // Split on the widest axis at the median.
    int axis = 0;
    double widest = -1.0;
    for (int d = 0; d < points.cols(); ++d) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i = begin; i < end; ++i) {
            const double v = points(index_[static_cast<size_t>(i)], d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = d;
        }
    }
    const int mid = (begin + end) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](int a, int b) { return points(a, axis) < points(b, axis); });

    nodes_[id].axis = axis;
    nodes_[id].split = points(index_[static_cast<size_t>(mid)], axis);
    const int left = build_node(begin, mid);
    const int right = build_node(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

namespace {

// Max-heap ordering on (distance^2, id): the root is the current worst.
inline bool key_less(const std::pair<double, int>& a, const std::pair<double, int>& b) {
    return a.first != b.first ? a.first < b.first : a.second < b.second;
}

}  // namespace

void KdTree::query(int node_id, const Vec& q, int k,
                   std::vector<std::pair<double, int>>& heap) const {
    const Node& node = nodes_[static_cast<size_t>(node_id)];
    if (node.axis < 0) {
        const Mat& pts = points_;
        for (int i = node.begin; i < node.end; ++i) {
            const int id = index_[static_cast<size_t>(i)];
            const double d2 = (pts.row(id).transpose() - q).squaredNorm();
            const std::pair<double, int> key{d2, id};
            if (static_cast<int>(heap.size()) < k) {
                heap.push_back(key);
                std::push_heap(heap.begin(), heap.end(), key_less);
            } else if (key_less(key, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), key_less);
                heap.back() = key;
                std::push_heap(heap.begin(), heap.end(), key_less);
            }
        }
        return;
    }

    const double delta = q(node.axis) - node.split;
    const int near = delta <= 0.0 ? node.left : node.right;
    const int far = delta <= 0.0 ? node.right : node.left;
    query(near, q, k, heap);
    // Equal axis distance may still hide a lower id on the far side.
    if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first) {
        query(far, q, k, heap);
    }
}

std::vector<int> KdTree::knn(const Vec& q, int k) const {
    if (points_.rows() == 0) {
        throw Error(ErrorCategory::invalid_argument, "KdTree::knn: empty index");
    }
    if (k < 1 || k > size()) {
        throw Error(ErrorCategory::invalid_argument, "KdTree::knn: k out of range");
    }
    std::vector<std::pair<double, int>> heap;
    heap.reserve(static_cast<size_t>(k));
    query(root_, q, k, heap);
    std::sort(heap.begin(), heap.end(), key_less);
    std::vector<int> ids(heap.size());
    for (size_t i = 0; i < heap.size(); ++i) ids[i] = heap[i].second;
    return ids;
}

}  // namespace aoc::hull
