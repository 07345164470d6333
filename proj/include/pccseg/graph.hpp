#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pccseg/error.hpp"
#include "pccseg/kd_tree.hpp"

namespace pccseg {

using NodeId = std::uint32_t;

// Undirected, unweighted adjacency in compressed sparse row form. Each
// node's neighbor list is sorted ascending, symmetric and free of self-loops.
class PixelGraph {
public:
    PixelGraph() = default;

    // Builds from an arbitrary list of directed pairs; both directions are
    // inserted, duplicates and self-loops dropped.
    static PixelGraph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return indices_.size() / 2; }

    // Unchecked; see `neighbors()` for the range-checked accessor.
    std::span<const NodeId> adjacent(NodeId node) const {
        return {indices_.data() + offsets_[node], indices_.data() + offsets_[node + 1]};
    }
    std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }

    friend bool operator==(const PixelGraph&, const PixelGraph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> indices_;
};

// Range-checked neighbor list; throws std::out_of_range.
std::span<const NodeId> neighbors(const PixelGraph& graph, NodeId node);

// Graphviz text with one node per pixel index, for small images.
void write_dot(std::ostream& out, const PixelGraph& graph, int width = 0);

enum class GraphMode { Knn, Epsilon };

struct GraphConfig {
    GraphMode mode = GraphMode::Knn;
    int k = 10;
    double sigma = 0.1;
};

std::string to_string(GraphMode mode);
GraphMode parse_graph_mode(const std::string& text);

/// Edge (i, j) iff ||f_i - f_j|| <= sigma and i != j.
template <typename Derived>
PixelGraph build_epsilon_graph(const Eigen::MatrixBase<Derived>& features, double sigma) {
    if (!(sigma > 0.0))
        throw ValidationError("invalid_params", "sigma must be positive");
    const auto n = static_cast<std::size_t>(features.rows());
    if (n == 0)
        throw ValidationError("invalid_params", "graph needs at least one node");
    const KdTree<double> tree(features);
    const double radius_sq = sigma * sigma;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : tree.within(i, radius_sq))
            if (i < j)
                edges.emplace_back(i, j);
    return PixelGraph::from_edges(n, edges);
}

/// Edge (i, j) iff either endpoint is among the other's k nearest
/// neighbors. Equal distances prefer the lower node index.
template <typename Derived>
PixelGraph build_knn_graph(const Eigen::MatrixBase<Derived>& features, int k) {
    const auto n = static_cast<std::size_t>(features.rows());
    if (k < 1 || static_cast<std::size_t>(k) >= n)
        throw ValidationError("invalid_params",
                              "k must satisfy 1 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    const KdTree<double> tree(features);
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(n * static_cast<std::size_t>(k));
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j : tree.knn(i, static_cast<std::size_t>(k)))
            edges.emplace_back(i, j);
    return PixelGraph::from_edges(n, edges);
}

template <typename Derived>
PixelGraph build_graph(const Eigen::MatrixBase<Derived>& features, const GraphConfig& config) {
    return config.mode == GraphMode::Knn ? build_knn_graph(features, config.k)
                                         : build_epsilon_graph(features, config.sigma);
}

}  // namespace pccseg
