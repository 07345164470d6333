#include "pccseg/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace pccseg {

PixelGraph PixelGraph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
    std::vector<std::size_t> counts(n + 1, 0);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n)
            throw std::out_of_range("edge endpoint out of range");
        if (a == b)
            continue;
        ++counts[a + 1];
        ++counts[b + 1];
    }
    for (std::size_t i = 0; i < n; ++i)
        counts[i + 1] += counts[i];

    std::vector<NodeId> scratch(counts[n]);
    std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
    for (const auto& [a, b] : edges) {
        if (a == b)
            continue;
        scratch[cursor[a]++] = b;
        scratch[cursor[b]++] = a;
    }

    PixelGraph graph;
    graph.offsets_.assign(n + 1, 0);
    graph.indices_.reserve(scratch.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto first = scratch.begin() + static_cast<std::ptrdiff_t>(counts[i]);
        auto last = scratch.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
        std::sort(first, last);
        last = std::unique(first, last);
        graph.indices_.insert(graph.indices_.end(), first, last);
        graph.offsets_[i + 1] = graph.indices_.size();
    }
    graph.indices_.shrink_to_fit();
    return graph;
}

std::span<const NodeId> neighbors(const PixelGraph& graph, NodeId node) {
    if (node >= graph.size())
        throw std::out_of_range("node " + std::to_string(node) + " out of range for graph of " +
                                std::to_string(graph.size()) + " nodes");
    return graph.adjacent(node);
}

void write_dot(std::ostream& out, const PixelGraph& graph, int width) {
    out << "graph pixels {\n";
    for (NodeId i = 0; i < graph.size(); ++i) {
        out << "  " << i;
        if (width > 0)
            out << " [label=\"" << i << "\\n(" << (i % width) << "," << (i / width) << ")\"]";
        out << ";\n";
    }
    for (NodeId i = 0; i < graph.size(); ++i)
        for (NodeId j : graph.adjacent(i))
            if (i < j)
                out << "  " << i << " -- " << j << ";\n";
    out << "}\n";
}

std::string to_string(GraphMode mode) { return mode == GraphMode::Knn ? "knn" : "epsilon"; }

GraphMode parse_graph_mode(const std::string& text) {
    if (text == "knn")
        return GraphMode::Knn;
    if (text == "epsilon")
        return GraphMode::Epsilon;
    throw ValidationError("invalid_params", "graph mode must be 'knn' or 'epsilon', got '" + text + "'");
}

}  // namespace pccseg
