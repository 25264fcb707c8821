#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "wine/topology.hpp"

using namespace wine::topology;

namespace {

constexpr std::size_t inf = 1u << 30;

// All-pairs distances by Floyd-Warshall over the edge list.
std::vector<std::vector<std::size_t>> floyd(const InterconnectGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

// Torus distance from coordinates: sum over dimensions of the ring distance.
std::size_t torus_distance(std::size_t a, std::size_t b, int k, int n) {
    std::size_t total = 0;
    for (int i = 0; i < n; ++i) {
        const int x = static_cast<int>(a % k), y = static_cast<int>(b % k);
        const int d = std::abs(x - y);
        total += static_cast<std::size_t>(std::min(d, k - d));
        a /= k;
        b /= k;
    }
    return total;
}

InterconnectGraph path_graph(std::size_t n) {
    InterconnectGraph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, medium::wired, 100.0, 0.6);
    return g;
}

}  // namespace

TEST(Graph, RejectsSelfLoopsAndDuplicates) {
    InterconnectGraph g(3);
    g.add_edge(0, 1, medium::wired, 100.0, 0.6);
    EXPECT_THROW(g.add_edge(1, 0, medium::wired, 100.0, 0.6), wine::domain_error);
    EXPECT_NO_THROW(g.add_edge(1, 0, medium::s_wine, 300.0, 0.6));
    EXPECT_THROW(g.add_edge(2, 2, medium::wired, 100.0, 0.6), wine::domain_error);
    EXPECT_THROW(g.add_edge(0, 2, medium::wired, 0.0, 0.6), wine::config_error);
    EXPECT_THROW(g.add_edge(0, 3, medium::wired, 1.0, 0.6), wine::domain_error);
    EXPECT_EQ(g.wireless_edge_count(), 1u);
    EXPECT_EQ(g.wireless_degree(0), 1u);
}

TEST(Torus, FourAryThreeCube) {
    const auto g = build_torus(4, 3);
    EXPECT_EQ(g.vertex_count(), 64u);
    const auto m = path_metrics(g);
    EXPECT_EQ(m.degree_histogram.size(), 1u);
    EXPECT_EQ(m.degree_histogram.at(6), 64u);
    EXPECT_EQ(m.diameter, 6u);
    EXPECT_DOUBLE_EQ(m.mean_hops_all_pairs, 3.0);
    EXPECT_DOUBLE_EQ(m.mean_hops, 3.0 * 64.0 / 63.0);
}

TEST(Torus, Triangle) {
    const auto m = path_metrics(build_torus(3, 1));
    EXPECT_DOUBLE_EQ(m.mean_hops_all_pairs, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.mean_hops, 1.0);
}

TEST(Torus, MatchesFloydAndClosedForm) {
    for (auto [k, n] : {std::pair{3, 2}, {4, 2}, {5, 2}, {4, 3}, {3, 3}, {6, 1}}) {
        const auto g = build_torus(k, n);
        const auto fw = floyd(g);
        const auto m = path_metrics(g);
        const std::size_t N = g.vertex_count();
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) {
                EXPECT_EQ(m.distances[a * N + b], fw[a][b]);
                EXPECT_EQ(fw[a][b], torus_distance(a, b, k, n));
            }
    }
}

class TorusMean : public ::testing::TestWithParam<int> {};

TEST_P(TorusMean, ClosedFormMeanAndDiameter) {
    const int k = GetParam();
    const auto g = build_torus(k, 3);
    const auto m = path_metrics(g);
    EXPECT_DOUBLE_EQ(m.mean_hops_all_pairs, 3.0 * k / 4.0);
    EXPECT_EQ(m.diameter, static_cast<std::size_t>(3 * (k / 2)));
    for (std::size_t v = 0; v < g.vertex_count(); ++v) EXPECT_EQ(g.degree(v), 6u);
}

INSTANTIATE_TEST_SUITE_P(EvenK, TorusMean, ::testing::Values(4, 6, 8));

TEST(Torus, Rejections) {
    EXPECT_THROW(build_torus(2, 3), wine::domain_error);
    EXPECT_THROW(build_torus(4, 0), wine::domain_error);
}

TEST(FatTree, BinaryThreeLevels) {
    const auto g = build_fat_tree(2, 3, LinkParams{100.0, 0.6});
    EXPECT_EQ(g.vertex_count(), 7u);
    EXPECT_EQ(g.edge_count(), 6u);
    for (const auto& e : g.edges())
        if (e.u == 0) {
            EXPECT_DOUBLE_EQ(e.capacity_gbps, 200.0);
        }
}

TEST(FatTree, CapacityCarriesLeafDemand) {
    // Oracle: every edge must carry the demand of the leaves beneath it.
    for (auto [r, levels] : {std::pair{2, 3}, {2, 4}, {3, 3}, {4, 2}}) {
        const auto g = build_fat_tree(r, levels, LinkParams{100.0, 0.6});
        const std::size_t n = g.vertex_count();
        std::size_t leaves = 1;
        for (int i = 1; i < levels; ++i) leaves *= r;
        EXPECT_EQ(n, (leaves * r - 1) / (r - 1));
        const std::size_t first_leaf = n - leaves;
        for (const auto& e : g.edges()) {
            // Child is the endpoint further from the root; count leaves below it.
            const std::size_t child = e.v;
            std::size_t below = 0;
            for (std::size_t leaf = first_leaf; leaf < n; ++leaf) {
                std::size_t x = leaf;
                while (x != child && x > 0) x = (x - 1) / r;
                below += x == child;
            }
            EXPECT_DOUBLE_EQ(e.capacity_gbps, 100.0 * below) << r << " " << levels;
        }
        // Full bisection: every level carries the same total capacity.
        std::map<std::size_t, double> per_level;
        const auto d0 = bfs_distances(g, 0);
        for (const auto& e : g.edges()) per_level[std::max(d0[e.u], d0[e.v])] += e.capacity_gbps;
        for (const auto& [lvl, cap] : per_level) EXPECT_DOUBLE_EQ(cap, per_level.begin()->second);
    }
}

TEST(Dragonfly, Balanced) {
    const auto g = build_dragonfly(4, 2, 9);
    EXPECT_EQ(g.vertex_count(), 36u);
    std::map<std::pair<std::size_t, std::size_t>, int> between;
    std::vector<int> global_ports(36, 0);
    for (const auto& e : g.edges()) {
        const auto gu = e.u / 4, gv = e.v / 4;
        if (gu == gv) continue;
        ++between[{std::min(gu, gv), std::max(gu, gv)}];
        ++global_ports[e.u];
        ++global_ports[e.v];
    }
    EXPECT_EQ(between.size(), 36u);
    for (const auto& [pair, count] : between) EXPECT_EQ(count, 1);
    for (int p : global_ports) EXPECT_EQ(p, 2);
    EXPECT_LE(path_metrics(g).diameter, 3u);
}

TEST(Dragonfly, Small) {
    const auto g = build_dragonfly(2, 1, 3);
    EXPECT_EQ(g.vertex_count(), 6u);
    std::size_t local = 0, global = 0;
    for (const auto& e : g.edges()) (e.u / 2 == e.v / 2 ? local : global) += 1;
    EXPECT_EQ(local, 3u);
    EXPECT_EQ(global, 3u);
}

TEST(Dragonfly, InfeasibleWiring) { EXPECT_THROW(build_dragonfly(2, 1, 5), wine::config_error); }

TEST(Shortcuts, ZeroIsIdentity) {
    const auto g = build_torus(4, 3);
    const auto s = add_random_shortcuts(g, 0, 42);
    ASSERT_EQ(s.edge_count(), g.edge_count());
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        EXPECT_EQ(s.edge(i).u, g.edge(i).u);
        EXPECT_EQ(s.edge(i).v, g.edge(i).v);
    }
}

TEST(Shortcuts, MonotoneAndDeterministic) {
    const auto g = build_torus(4, 3);
    const auto base = path_metrics(g);
    const auto a = add_random_shortcuts(g, 32, 7);
    const auto b = add_random_shortcuts(g, 32, 7);
    ASSERT_EQ(a.edge_count(), g.edge_count() + 32);
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        EXPECT_EQ(a.edge(i).u, b.edge(i).u);
        EXPECT_EQ(a.edge(i).v, b.edge(i).v);
    }
    const auto m = path_metrics(a);
    for (std::size_t i = 0; i < m.distances.size(); ++i) EXPECT_LE(m.distances[i], base.distances[i]);
    EXPECT_LT(m.mean_hops_all_pairs, 3.0);
}

TEST(Shortcuts, GoldenMeanHops) {
    // Recorded on the first run with seed 7.
    const auto m = path_metrics(add_random_shortcuts(build_torus(4, 3), 32, 7));
    EXPECT_NEAR(m.mean_hops_all_pairs, 2.4228515625, 1e-12);
}

TEST(Shortcuts, TooMany) {
    InterconnectGraph tri = build_torus(3, 1);
    EXPECT_THROW(add_random_shortcuts(tri, 1, 1), wine::domain_error);
}

TEST(Metrics, CompleteGraph) {
    InterconnectGraph k5(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) k5.add_edge(i, j, medium::wired, 1.0, 0.6);
    const auto m = path_metrics(k5);
    EXPECT_DOUBLE_EQ(m.mean_hops, 1.0);
    EXPECT_EQ(m.diameter, 1u);
}

TEST(Metrics, PathGraph) { EXPECT_DOUBLE_EQ(path_metrics(path_graph(4)).mean_hops, 20.0 / 12.0); }

TEST(Metrics, DisconnectedListsComponents) {
    InterconnectGraph g(4);
    g.add_edge(0, 1, medium::wired, 1.0, 0.6);
    g.add_edge(2, 3, medium::wired, 1.0, 0.6);
    try {
        path_metrics(g);
        FAIL();
    } catch (const wine::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("2 components"), std::string::npos);
    }
}

TEST(BuildTopology, Dispatch) {
    TopologySpec spec;
    spec.base = FatTreeParams{3, 3};
    EXPECT_EQ(build_topology(spec).vertex_count(), 13u);
    spec.base = DragonflyParams{2, 1, 3};
    spec.shortcuts = 2;
    EXPECT_EQ(build_topology(spec).edge_count(), 8u);
}

TEST(BuildTopology, SameSpecSameEdgeList) {
    TopologySpec spec;
    spec.base = TorusParams{4, 3};
    spec.shortcuts = 20;
    spec.seed = 99;
    const auto a = build_topology(spec), b = build_topology(spec);
    ASSERT_EQ(a.edge_count(), b.edge_count());
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        EXPECT_EQ(a.edge(i).u, b.edge(i).u);
        EXPECT_EQ(a.edge(i).v, b.edge(i).v);
        EXPECT_EQ(a.edge(i).kind, b.edge(i).kind);
        EXPECT_EQ(a.edge(i).capacity_gbps, b.edge(i).capacity_gbps);
    }
}
