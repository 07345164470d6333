#include <doctest.h>

#include <random>
#include <sstream>

#include "pccseg/graph.hpp"
#include "pccseg/image.hpp"
#include "support.hpp"

using namespace pccseg;
using namespace pccseg::testing;

namespace {

Points line_points(std::initializer_list<double> xs) {
    Points p(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs)
        p(i++, 0) = x;
    return p;
}

void check_well_formed(const PixelGraph& g) {
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto adj = g.adjacent(i);
        CHECK(std::is_sorted(adj.begin(), adj.end()));
        CHECK(std::adjacent_find(adj.begin(), adj.end()) == adj.end());
        for (NodeId j : adj) {
            CHECK(j != i);
            const auto back = g.adjacent(j);
            CHECK(std::binary_search(back.begin(), back.end(), i));
        }
    }
}

}  // namespace

TEST_CASE("epsilon graph on collinear points") {
    const PixelGraph g = build_epsilon_graph(line_points({0.0, 1.0, 2.0}), 1.5);
    CHECK(g.edge_count() == 2);
    CHECK(to_sets(g) == AdjacencySets{{1}, {0, 2}, {1}});
}

TEST_CASE("epsilon graph threshold extremes") {
    const Points p = random_points(30, 5, 7);
    const PixelGraph complete = build_epsilon_graph(p, 10.0);
    CHECK(complete.edge_count() == 30 * 29 / 2);
    check_well_formed(complete);

    const PixelGraph empty = build_epsilon_graph(p, std::numeric_limits<double>::denorm_min());
    CHECK(empty.edge_count() == 0);

    CHECK_THROWS_AS(build_epsilon_graph(p, 0.0), ValidationError);
    CHECK_THROWS_AS(build_epsilon_graph(p, -1.0), ValidationError);
}

TEST_CASE("epsilon graph matches the all-pairs oracle") {
    const Points p = random_points(250, 5, 21);
    for (double sigma : {0.1, 0.25, 0.4, 0.7}) {
        CAPTURE(sigma);
        CHECK(to_sets(build_epsilon_graph(p, sigma)) == brute_force_epsilon(p, sigma));
    }
}

TEST_CASE("knn graph of two points") {
    const PixelGraph g = build_knn_graph(line_points({0.0, 3.0}), 1);
    CHECK(g.size() == 2);
    CHECK(g.edge_count() == 1);
    CHECK_THROWS_AS(build_knn_graph(line_points({0.0, 3.0}), 2), ValidationError);
    CHECK_THROWS_AS(build_knn_graph(line_points({0.0, 3.0}), 0), ValidationError);
}

TEST_CASE("knn graph matches the brute-force oracle on random points") {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const Points p = random_points(200, 5, seed);
        for (int k : {1, 4, 10}) {
            CAPTURE(seed);
            CAPTURE(k);
            const PixelGraph g = build_knn_graph(p, k);
            CHECK(to_sets(g) == brute_force_knn(p, k));
            check_well_formed(g);
        }
    }
}

TEST_CASE("knn graph with heavy ties and duplicates matches the oracle") {
    std::mt19937 gen(9);
    Points p(300, 3);
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        for (Eigen::Index d = 0; d < 3; ++d)
            p(i, d) = static_cast<double>(gen() % 4);  // only 64 distinct points
    for (int k : {1, 5, 12}) {
        CAPTURE(k);
        const PixelGraph a = build_knn_graph(p, k);
        const PixelGraph b = build_knn_graph(p, k);
        CHECK(a == b);
        CHECK(to_sets(a) == brute_force_knn(p, k));
    }
}

TEST_CASE("knn graph contains every node's own k nearest") {
    const Points p = random_points(120, 4, 5);
    const int k = 6;
    const PixelGraph g = build_knn_graph(p, k);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        std::vector<std::pair<double, NodeId>> row;
        for (Eigen::Index j = 0; j < p.rows(); ++j)
            if (j != i)
                row.emplace_back(oracle_sq_dist(p, i, j), static_cast<NodeId>(j));
        std::sort(row.begin(), row.end());
        const auto adj = g.adjacent(static_cast<NodeId>(i));
        for (int r = 0; r < k; ++r)
            CHECK(std::binary_search(adj.begin(), adj.end(), row[r].second));
    }
}

TEST_CASE("10x7 scene graph with k = 10") {
    const RgbImage small = downscale(synthetic_scene(), 10, 7);
    const FeatureMatrix<double> f = extract_features(small, 1.0);
    const PixelGraph g = build_knn_graph(f, 10);
    CHECK(g.size() == 70);
    check_well_formed(g);
    const AdjacencySets oracle = brute_force_knn(Points(f), 10);
    for (NodeId i = 0; i < 70; ++i) {
        CHECK(g.degree(i) >= 10);
        CHECK(neighbors(g, i).size() == oracle[i].size());
    }
}

TEST_CASE("neighbors accessor") {
    const std::vector<std::pair<NodeId, NodeId>> tri{{0, 1}, {1, 2}, {2, 0}};
    const PixelGraph k3 = PixelGraph::from_edges(3, tri);
    const auto n0 = neighbors(k3, 0);
    CHECK(std::vector<NodeId>(n0.begin(), n0.end()) == std::vector<NodeId>{1, 2});
    CHECK_THROWS_AS(neighbors(k3, 3), std::out_of_range);

    const PixelGraph none = PixelGraph::from_edges(4, {});
    for (NodeId i = 0; i < 4; ++i)
        CHECK(neighbors(none, i).empty());
}

TEST_CASE("from_edges drops self-loops and duplicates") {
    const std::vector<std::pair<NodeId, NodeId>> edges{{0, 0}, {0, 1}, {1, 0}, {2, 1}, {2, 1}};
    const PixelGraph g = PixelGraph::from_edges(3, edges);
    CHECK(g.edge_count() == 2);
    check_well_formed(g);
}

TEST_CASE("graphs from random feature sets are symmetric and loop-free") {
    std::mt19937 gen(77);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + gen() % 80;
        const Points p = random_points(n, 1 + static_cast<int>(gen() % 5), gen());
        check_well_formed(build_knn_graph(p, 1 + static_cast<int>(gen() % (n - 1))));
        check_well_formed(build_epsilon_graph(p, 0.05 + (gen() % 100) / 100.0));
    }
}

TEST_CASE("DOT export lists one node per pixel") {
    const RgbImage small = downscale(synthetic_scene(), 10, 7);
    const PixelGraph g = build_knn_graph(extract_features(small, 1.0), 10);
    std::ostringstream dot;
    write_dot(dot, g, 10);
    const std::string text = dot.str();
    CHECK(text.rfind("graph pixels {", 0) == 0);
    std::size_t node_lines = 0, edge_lines = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (line.find(" -- ") != std::string::npos)
            ++edge_lines;
        else if (line.find("[label=") != std::string::npos)
            ++node_lines;
    }
    CHECK(node_lines == 70);
    CHECK(edge_lines == g.edge_count());
}

TEST_CASE("graph mode parsing") {
    CHECK(parse_graph_mode("knn") == GraphMode::Knn);
    CHECK(parse_graph_mode("epsilon") == GraphMode::Epsilon);
    CHECK(to_string(GraphMode::Epsilon) == "epsilon");
    CHECK_THROWS_AS(parse_graph_mode("radius"), ValidationError);
}
