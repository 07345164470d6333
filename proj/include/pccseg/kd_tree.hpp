#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace pccseg {

// Exact nearest-neighbor index over the rows of a dense point matrix.
// Neighbor order is the total order (squared distance, index), so results
// match a brute-force scan bit for bit, ties included.
template <typename Scalar>
class KdTree {
public:
    using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Candidate = std::pair<Scalar, std::uint32_t>;  // (squared distance, index)

    template <typename Derived>
    explicit KdTree(const Eigen::MatrixBase<Derived>& points, int leaf_size = 16)
        : points_(points.template cast<Scalar>()), leaf_size_(std::max(leaf_size, 1)) {
        order_.resize(static_cast<std::size_t>(points_.rows()));
        std::iota(order_.begin(), order_.end(), 0u);
        if (!order_.empty())
            build(0, static_cast<std::uint32_t>(order_.size()));
    }

    Eigen::Index size() const { return points_.rows(); }
    Eigen::Index dims() const { return points_.cols(); }

    // Squared Euclidean distance summed in dimension order.
    Scalar squared_distance(std::uint32_t a, std::uint32_t b) const {
        Scalar acc(0);
        for (Eigen::Index d = 0; d < points_.cols(); ++d) {
            const Scalar diff = points_(a, d) - points_(b, d);
            acc += diff * diff;
        }
        return acc;
    }

    // The k smallest (distance, index) pairs from `query`, excluding itself, ascending.
    std::vector<std::uint32_t> knn(std::uint32_t query, std::size_t k) const {
        std::priority_queue<Candidate> heap;  // max-heap: worst candidate on top
        if (k > 0 && !nodes_.empty())
            search_knn(0, query, k, heap);
        std::vector<std::uint32_t> result(heap.size());
        for (auto it = result.rbegin(); it != result.rend(); ++it) {
            *it = heap.top().second;
            heap.pop();
        }
        return result;
    }

    // All indices j != query with squared distance <= radius_sq, ascending by index.
    std::vector<std::uint32_t> within(std::uint32_t query, Scalar radius_sq) const {
        std::vector<std::uint32_t> result;
        if (!nodes_.empty())
            search_radius(0, query, radius_sq, result);
        std::sort(result.begin(), result.end());
        return result;
    }

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t split_dim = -1;  // -1 marks a leaf
        Scalar split = Scalar(0);
        std::uint32_t left = 0;
        std::uint32_t right = 0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({begin, end});
        if (end - begin <= static_cast<std::uint32_t>(leaf_size_))
            return id;

        Eigen::Index best_dim = 0;
        Scalar best_spread(-1);
        for (Eigen::Index d = 0; d < points_.cols(); ++d) {
            Scalar lo = points_(order_[begin], d), hi = lo;
            for (std::uint32_t i = begin + 1; i < end; ++i) {
                lo = std::min(lo, points_(order_[i], d));
                hi = std::max(hi, points_(order_[i], d));
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                best_dim = d;
            }
        }
        if (best_spread <= Scalar(0))
            return id;  // all points coincide

        const std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) { return points_(a, best_dim) < points_(b, best_dim); });
        const Scalar split = points_(order_[mid], best_dim);

        // Left holds coordinates <= split, right holds >= split.
        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        Node& node = nodes_[id];
        node.split_dim = static_cast<std::int32_t>(best_dim);
        node.split = split;
        node.left = left;
        node.right = right;
        return id;
    }

    void search_knn(std::uint32_t node_id, std::uint32_t query, std::size_t k,
                    std::priority_queue<Candidate>& heap) const {
        const Node& node = nodes_[node_id];
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::uint32_t j = order_[i];
                if (j == query)
                    continue;
                const Candidate cand{squared_distance(query, j), j};
                if (heap.size() < k) {
                    heap.push(cand);
                } else if (cand < heap.top()) {
                    heap.pop();
                    heap.push(cand);
                }
            }
            return;
        }
        const Scalar diff = points_(query, node.split_dim) - node.split;
        const std::uint32_t near = diff <= Scalar(0) ? node.left : node.right;
        const std::uint32_t far = diff <= Scalar(0) ? node.right : node.left;
        search_knn(near, query, k, heap);
        // Equal-distance points on the far side may still win on index.
        if (heap.size() < k || diff * diff <= heap.top().first)
            search_knn(far, query, k, heap);
    }

    void search_radius(std::uint32_t node_id, std::uint32_t query, Scalar radius_sq,
                       std::vector<std::uint32_t>& out) const {
        const Node& node = nodes_[node_id];
        if (node.split_dim < 0) {
            for (std::uint32_t i = node.begin; i < node.end; ++i) {
                const std::uint32_t j = order_[i];
                if (j != query && squared_distance(query, j) <= radius_sq)
                    out.push_back(j);
            }
            return;
        }
        const Scalar diff = points_(query, node.split_dim) - node.split;
        if (diff <= Scalar(0) || diff * diff <= radius_sq)
            search_radius(node.left, query, radius_sq, out);
        if (diff >= Scalar(0) || diff * diff <= radius_sq)
            search_radius(node.right, query, radius_sq, out);
    }

    Points points_;
    int leaf_size_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace pccseg
