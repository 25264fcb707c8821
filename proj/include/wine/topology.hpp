#pragma once

// Wired baseline interconnects (torus, fat-tree, Dragonfly, random shortcuts)
// and hop-count metrics over them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "wine/error.hpp"
#include "wine/random.hpp"

namespace wine::topology {

enum class medium { wired, s_wine, r_wine };

inline const char* to_string(medium m) {
    switch (m) {
    case medium::wired: return "wired";
    case medium::s_wine: return "s-WINE";
    case medium::r_wine: return "r-WINE";
    }
    return "?";
}

inline bool is_wireless(medium m) { return m != medium::wired; }

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    medium kind = medium::wired;
    double capacity_gbps = 0.0;
    double hop_latency_us = 0.0;
};

struct LinkParams {
    double capacity_gbps = 200.0;  // two 100 Gbps lanes
    double hop_latency_us = 0.6;
};

inline constexpr std::size_t unreachable = std::numeric_limits<std::size_t>::max();

/// Undirected multigraph over racks: at most one edge per (pair, medium).
class InterconnectGraph {
public:
    InterconnectGraph() = default;
    explicit InterconnectGraph(std::size_t vertex_count) : incident_(vertex_count) {}

    std::size_t vertex_count() const { return incident_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_[i]; }
    const std::vector<std::size_t>& incident(std::size_t v) const { return incident_[v]; }

    std::size_t other(std::size_t edge_index, std::size_t v) const {
        const Edge& e = edges_[edge_index];
        return e.u == v ? e.v : e.u;
    }

    bool has_edge(std::size_t u, std::size_t v, medium m) const {
        for (std::size_t i : incident_[u]) {
            const Edge& e = edges_[i];
            if (e.kind == m && other(i, u) == v) return true;
        }
        return false;
    }

    bool adjacent(std::size_t u, std::size_t v) const {
        for (std::size_t i : incident_[u])
            if (other(i, u) == v) return true;
        return false;
    }

    std::size_t add_edge(std::size_t u, std::size_t v, medium m, double capacity_gbps, double hop_latency_us) {
        if (u >= vertex_count() || v >= vertex_count())
            throw domain_error(fmt::format("add_edge: vertex out of range ({}, {})", u, v));
        if (u == v) throw domain_error(fmt::format("add_edge: self-loop at {}", u));
        if (!(capacity_gbps > 0.0)) throw config_error(fmt::format("add_edge: capacity of ({}, {}) must be > 0", u, v));
        if (!(hop_latency_us >= 0.0)) throw config_error("add_edge: hop latency must be >= 0");
        if (has_edge(u, v, m))
            throw domain_error(fmt::format("add_edge: duplicate {} edge ({}, {})", to_string(m), u, v));
        edges_.push_back({std::min(u, v), std::max(u, v), m, capacity_gbps, hop_latency_us});
        incident_[u].push_back(edges_.size() - 1);
        incident_[v].push_back(edges_.size() - 1);
        return edges_.size() - 1;
    }

    std::size_t degree(std::size_t v) const { return incident_[v].size(); }

    std::size_t wireless_degree(std::size_t v) const {
        std::size_t d = 0;
        for (std::size_t i : incident_[v]) d += is_wireless(edges_[i].kind) ? 1 : 0;
        return d;
    }

    std::size_t wireless_edge_count() const {
        return static_cast<std::size_t>(
            std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return is_wireless(e.kind); }));
    }

    /// Copy keeping only edges for which `keep(edge)` holds.
    template <typename Pred>
    InterconnectGraph filtered(Pred keep) const {
        InterconnectGraph g(vertex_count());
        for (const Edge& e : edges_)
            if (keep(e)) g.add_edge(e.u, e.v, e.kind, e.capacity_gbps, e.hop_latency_us);
        return g;
    }

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

// ---------------------------------------------------------------------------
// Generators

/// k-ary n-cube with wrap-around; vertex id is the mixed-radix coordinate
/// with dimension 0 least significant.
inline InterconnectGraph build_torus(int k, int n, const LinkParams& link = {}) {
    if (k < 3) throw domain_error(fmt::format("build_torus: k = {} unsupported (need k >= 3)", k));
    if (n < 1) throw domain_error("build_torus: need n >= 1");
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(k);
    InterconnectGraph g(count);
    std::size_t stride = 1;
    for (int d = 0; d < n; ++d) {
        for (std::size_t v = 0; v < count; ++v) {
            const std::size_t coord = (v / stride) % static_cast<std::size_t>(k);
            const std::size_t next = coord + 1 == static_cast<std::size_t>(k) ? v - coord * stride : v + stride;
            g.add_edge(v, next, medium::wired, link.capacity_gbps, link.hop_latency_us);
        }
        stride *= static_cast<std::size_t>(k);
    }
    return g;
}

/// Complete r-ary tree, breadth-first numbering (root = 0). An edge whose
/// child sits at depth d carries leaf_capacity * r^(levels-1-d).
inline InterconnectGraph build_fat_tree(int r, int levels, const LinkParams& leaf_link = {}) {
    if (r < 2) throw domain_error("build_fat_tree: need r >= 2");
    if (levels < 2) throw domain_error("build_fat_tree: need levels >= 2");
    std::size_t count = 0;
    std::size_t width = 1;
    for (int l = 0; l < levels; ++l, width *= static_cast<std::size_t>(r)) count += width;
    InterconnectGraph g(count);
    std::size_t level_start = 0;
    width = 1;
    for (int depth = 1; depth < levels; ++depth) {
        const std::size_t child_start = level_start + width;
        const double cap = leaf_link.capacity_gbps * std::pow(static_cast<double>(r), levels - 1 - depth);
        for (std::size_t p = 0; p < width; ++p)
            for (int c = 0; c < r; ++c)
                g.add_edge(level_start + p, child_start + p * static_cast<std::size_t>(r) + static_cast<std::size_t>(c),
                           medium::wired, cap, leaf_link.hop_latency_us);
        level_start = child_start;
        width *= static_cast<std::size_t>(r);
    }
    return g;
}

/// g groups of a routers, complete local wiring, and a * h_global global
/// ports per group. Group pairs are served round-robin, and ports within a
/// group rotate across routers, so the balanced case g = a*h + 1 joins every
/// group pair with exactly one global cable.
inline InterconnectGraph build_dragonfly(int a, int h_global, int g, const LinkParams& link = {}) {
    if (a < 1) throw domain_error("build_dragonfly: need a >= 1");
    if (g < 2) throw domain_error("build_dragonfly: need g >= 2");
    if (h_global < 0) throw domain_error("build_dragonfly: need h_global >= 0");
    const std::size_t ports = static_cast<std::size_t>(a) * static_cast<std::size_t>(h_global);
    if (ports < static_cast<std::size_t>(g - 1))
        throw config_error(fmt::format("build_dragonfly: a*h = {} global ports cannot reach {} other groups", ports,
                                       g - 1));
    const auto A = static_cast<std::size_t>(a);
    const auto G = static_cast<std::size_t>(g);
    InterconnectGraph net(A * G);
    for (std::size_t grp = 0; grp < G; ++grp)
        for (std::size_t i = 0; i < A; ++i)
            for (std::size_t j = i + 1; j < A; ++j)
                net.add_edge(grp * A + i, grp * A + j, medium::wired, link.capacity_gbps, link.hop_latency_us);

    std::vector<std::size_t> next_port(G, 0);
    const std::size_t rounds = ports / (G - 1);
    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t x = 0; x < G; ++x) {
            for (std::size_t y = x + 1; y < G; ++y) {
                // Skip a port whose router is already cabled to the partner router.
                for (std::size_t tries = 0; tries < ports; ++tries) {
                    const std::size_t u = x * A + next_port[x] % A;
                    const std::size_t v = y * A + next_port[y] % A;
                    if (!net.has_edge(u, v, medium::wired)) {
                        net.add_edge(u, v, medium::wired, link.capacity_gbps, link.hop_latency_us);
                        break;
                    }
                    ++next_port[y];
                }
                ++next_port[x];
                ++next_port[y];
            }
        }
    }
    return net;
}

/// Adds `count` wired edges between distinct, currently non-adjacent pairs
/// drawn uniformly with a seeded generator.
inline InterconnectGraph add_random_shortcuts(const InterconnectGraph& graph, std::size_t count, std::uint64_t seed,
                                              const LinkParams& link = {}) {
    InterconnectGraph out = graph;
    if (count == 0) return out;
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    for (std::size_t u = 0; u < graph.vertex_count(); ++u)
        for (std::size_t v = u + 1; v < graph.vertex_count(); ++v)
            if (!graph.adjacent(u, v)) pool.emplace_back(u, v);
    if (count > pool.size())
        throw domain_error(fmt::format("add_random_shortcuts: {} shortcuts requested, only {} non-adjacent pairs",
                                       count, pool.size()));
    rng gen(seed);
    partial_shuffle(pool, count, gen);
    for (std::size_t i = 0; i < count; ++i)
        out.add_edge(pool[i].first, pool[i].second, medium::wired, link.capacity_gbps, link.hop_latency_us);
    return out;
}

struct TorusParams {
    int k = 4;
    int n = 3;
};
struct FatTreeParams {
    int r = 2;
    int levels = 3;
};
struct DragonflyParams {
    int a = 4;
    int h_global = 2;
    int g = 9;
};

struct TopologySpec {
    std::variant<TorusParams, FatTreeParams, DragonflyParams> base = TorusParams{};
    std::size_t shortcuts = 0;  // random_augmented when > 0
    std::uint64_t seed = 1;
    LinkParams link;
};

inline InterconnectGraph build_topology(const TopologySpec& spec) {
    InterconnectGraph g = std::visit(
        [&](const auto& p) -> InterconnectGraph {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, TorusParams>)
                return build_torus(p.k, p.n, spec.link);
            else if constexpr (std::is_same_v<T, FatTreeParams>)
                return build_fat_tree(p.r, p.levels, spec.link);
            else
                return build_dragonfly(p.a, p.h_global, p.g, spec.link);
        },
        spec.base);
    return add_random_shortcuts(g, spec.shortcuts, spec.seed, spec.link);
}

// ---------------------------------------------------------------------------
// Metrics

/// Unit-weight BFS distances; edges rejected by `use` are ignored.
template <typename EdgePred>
std::vector<std::size_t> bfs_distances(const InterconnectGraph& g, std::size_t src, EdgePred use) {
    std::vector<std::size_t> dist(g.vertex_count(), unreachable);
    std::deque<std::size_t> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t ei : g.incident(v)) {
            if (!use(g.edge(ei))) continue;
            const std::size_t w = g.other(ei, v);
            if (dist[w] != unreachable) continue;
            dist[w] = dist[v] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

inline std::vector<std::size_t> bfs_distances(const InterconnectGraph& g, std::size_t src) {
    return bfs_distances(g, src, [](const Edge&) { return true; });
}

inline std::vector<std::vector<std::size_t>> connected_components(const InterconnectGraph& g) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<bool> seen(g.vertex_count(), false);
    for (std::size_t s = 0; s < g.vertex_count(); ++s) {
        if (seen[s]) continue;
        const auto d = bfs_distances(g, s);
        std::vector<std::size_t> comp;
        for (std::size_t v = 0; v < d.size(); ++v)
            if (d[v] != unreachable) {
                comp.push_back(v);
                seen[v] = true;
            }
        comps.push_back(std::move(comp));
    }
    return comps;
}

struct PathMetrics {
    double mean_hops = 0.0;            // over ordered distinct pairs
    double mean_hops_all_pairs = 0.0;  // over all N^2 ordered pairs, self-pairs at 0
    std::size_t diameter = 0;
    std::map<std::size_t, std::size_t> degree_histogram;  // degree -> vertex count
    std::vector<std::size_t> distances;                   // row-major N x N
};

inline PathMetrics path_metrics(const InterconnectGraph& g) {
    const std::size_t n = g.vertex_count();
    if (n == 0) throw domain_error("path_metrics: empty graph");
    PathMetrics m;
    m.distances.resize(n * n);
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto d = bfs_distances(g, s);
        for (std::size_t v = 0; v < n; ++v) {
            if (d[v] == unreachable) {
                const auto comps = connected_components(g);
                std::string listing;
                for (const auto& c : comps)
                    listing += fmt::format("{}[{} vertices from {}]", listing.empty() ? "" : " ", c.size(), c.front());
                throw domain_error(
                    fmt::format("path_metrics: graph is disconnected into {} components: {}", comps.size(), listing));
            }
            m.distances[s * n + v] = d[v];
            total += d[v];
            m.diameter = std::max(m.diameter, d[v]);
        }
    }
    m.mean_hops = n > 1 ? static_cast<double>(total) / static_cast<double>(n * (n - 1)) : 0.0;
    m.mean_hops_all_pairs = static_cast<double>(total) / static_cast<double>(n * n);
    for (std::size_t v = 0; v < n; ++v) ++m.degree_histogram[g.degree(v)];
    return m;
}

}  // namespace wine::topology
