#pragma once

// Test-only fixtures and brute-force oracles. Nothing here calls into the
// kd-tree or engine code paths it is used to check.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pccseg/graph.hpp"
#include "pccseg/image.hpp"

namespace pccseg::testing {

using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using AdjacencySets = std::vector<std::set<NodeId>>;

inline double oracle_sq_dist(const Points& p, Eigen::Index a, Eigen::Index b) {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < p.cols(); ++d) {
        const double diff = p(a, d) - p(b, d);
        acc += diff * diff;
    }
    return acc;
}

// Sort each full distance row, take the first k, OR-symmetrize.
inline AdjacencySets brute_force_knn(const Points& p, int k) {
    const auto n = static_cast<std::size_t>(p.rows());
    AdjacencySets adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, NodeId>> row;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                row.emplace_back(oracle_sq_dist(p, i, j), static_cast<NodeId>(j));
        std::sort(row.begin(), row.end());
        for (int r = 0; r < k; ++r) {
            adj[i].insert(row[r].second);
            adj[row[r].second].insert(static_cast<NodeId>(i));
        }
    }
    return adj;
}

inline AdjacencySets brute_force_epsilon(const Points& p, double sigma) {
    const auto n = static_cast<std::size_t>(p.rows());
    AdjacencySets adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && std::sqrt(oracle_sq_dist(p, i, j)) <= sigma)
                adj[i].insert(static_cast<NodeId>(j));
    return adj;
}

inline AdjacencySets to_sets(const PixelGraph& g) {
    AdjacencySets adj(g.size());
    for (NodeId i = 0; i < g.size(); ++i)
        for (NodeId j : g.adjacent(i))
            adj[i].insert(j);
    return adj;
}

inline Points random_points(std::size_t n, int dims, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Points p(static_cast<Eigen::Index>(n), dims);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index d = 0; d < p.cols(); ++d)
            p(i, d) = u(gen);
    return p;
}

// Component id per node by breadth-first search; -1 never occurs.
inline std::vector<int> components(const PixelGraph& g) {
    std::vector<int> comp(g.size(), -1);
    int next = 0;
    for (NodeId s = 0; s < g.size(); ++s) {
        if (comp[s] >= 0)
            continue;
        std::deque<NodeId> q{s};
        comp[s] = next;
        while (!q.empty()) {
            const NodeId u = q.front();
            q.pop_front();
            for (NodeId v : g.adjacent(u))
                if (comp[v] < 0) {
                    comp[v] = next;
                    q.push_back(v);
                }
        }
        ++next;
    }
    return comp;
}

// Two flat colors split vertically at width / 2.
inline RgbImage two_region_image(int width, int height, Rgb left = {200, 40, 40}, Rgb right = {40, 40, 200}) {
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = x < width / 2 ? left : right;
    return img;
}

inline int two_region_truth(int x, int width) { return x < width / 2 ? 1 : 2; }

// Raw scribble layer: a vertical 5-pixel stroke centered in each half.
inline std::vector<std::uint8_t> two_region_scribbles(int width, int height, std::uint8_t left_value = 1,
                                                      std::uint8_t right_value = 2) {
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height, 0);
    const int y0 = height / 2 - 2;
    for (int i = 0; i < 5; ++i) {
        raw[static_cast<std::size_t>(y0 + i) * width + width / 4] = left_value;
        raw[static_cast<std::size_t>(y0 + i) * width + 3 * width / 4] = right_value;
    }
    return raw;
}

// 200x140 synthetic scene: white background with a blue block whose
// edges fall on the 20-pixel grid used when shrinking to 10x7.
inline constexpr Rgb kSceneBackground{255, 255, 255};
inline constexpr Rgb kSceneObject{30, 60, 200};

inline bool scene_is_object(int x, int y, int width = 200, int height = 140) {
    // Object spans blocks [3, 7) x [2, 5) of the 10x7 grid.
    return x * 10 >= 3 * width && x * 10 < 7 * width && y * 7 >= 2 * height && y * 7 < 5 * height;
}

inline RgbImage synthetic_scene(int width = 200, int height = 140) {
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img.at(x, y) = scene_is_object(x, y, width, height) ? kSceneObject : kSceneBackground;
    return img;
}

// User markings: one short stroke inside the object, one in the background.
inline std::vector<std::uint8_t> scene_scribbles(int width = 200, int height = 140, int stroke = 9) {
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height, 0);
    const int cy = height / 2;
    for (int i = 0; i < stroke; ++i) {
        raw[static_cast<std::size_t>(cy) * width + width / 2 - stroke / 2 + i] = 200;     // object
        raw[static_cast<std::size_t>(height / 10) * width + width / 10 + i] = 50;          // background
    }
    return raw;
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pccseg::testing
