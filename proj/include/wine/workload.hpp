#pragma once

// Synthetic benchmark traffic, hop-latency simulation, static congestion
// model and the calibrated benchmark-speedup model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "wine/error.hpp"
#include "wine/random.hpp"
#include "wine/topology.hpp"

namespace wine::workload {

enum class pattern { neighbor, alltoall, random_perm };

inline const char* to_string(pattern p) {
    switch (p) {
    case pattern::neighbor: return "neighbor";
    case pattern::alltoall: return "alltoall";
    case pattern::random_perm: return "random_perm";
    }
    return "?";
}

inline pattern parse_pattern(std::string_view s) {
    if (s == "neighbor") return pattern::neighbor;
    if (s == "alltoall") return pattern::alltoall;
    if (s == "random_perm") return pattern::random_perm;
    throw config_error(fmt::format("unknown traffic pattern '{}'", s));
}

struct Demand {
    std::size_t src = 0;
    std::size_t dst = 0;
    double weight = 0.0;
};

struct TrafficMatrix {
    pattern tag = pattern::alltoall;
    std::size_t vertex_count = 0;
    std::vector<Demand> demands;  // sorted by (src, dst), positive weights only

    double total() const {
        return std::accumulate(demands.begin(), demands.end(), 0.0,
                               [](double acc, const Demand& d) { return acc + d.weight; });
    }
};

/// neighbor: wired adjacency in both directions; alltoall: every ordered
/// distinct pair; random_perm: a seeded permutation, fixed points dropped.
inline TrafficMatrix traffic_matrix(pattern p, const topology::InterconnectGraph& graph, std::uint64_t seed = 1) {
    const std::size_t n = graph.vertex_count();
    if (n == 0) throw domain_error("traffic_matrix: empty graph");
    TrafficMatrix tm;
    tm.tag = p;
    tm.vertex_count = n;
    switch (p) {
    case pattern::neighbor:
        for (const auto& e : graph.edges()) {
            if (e.kind != topology::medium::wired) continue;
            tm.demands.push_back({e.u, e.v, 1.0});
            tm.demands.push_back({e.v, e.u, 1.0});
        }
        break;
    case pattern::alltoall:
        tm.demands.reserve(n * (n - 1));
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
                if (s != t) tm.demands.push_back({s, t, 1.0});
        break;
    case pattern::random_perm: {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng gen(seed);
        partial_shuffle(perm, n, gen);
        for (std::size_t s = 0; s < n; ++s)
            if (perm[s] != s) tm.demands.push_back({s, perm[s], 1.0});
        break;
    }
    }
    std::sort(tm.demands.begin(), tm.demands.end(),
              [](const Demand& a, const Demand& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    if (tm.demands.empty()) throw domain_error(fmt::format("traffic_matrix: pattern {} produced no demand", to_string(p)));
    return tm;
}

// ---------------------------------------------------------------------------
// Latency

struct LatencyReport {
    double mean_latency_us = 0.0;  // demand-weighted
    double tail_latency_us = 0.0;  // worst demanded pair
    double mean_hops = 0.0;        // demand-weighted
    // Uniform average over all N^2 ordered rack pairs, self-pairs at zero.
    double rack_mean_latency_us = 0.0;
    double rack_mean_hops = 0.0;
};

namespace detail {

struct Route {
    double latency = std::numeric_limits<double>::infinity();
    std::size_t hops = topology::unreachable;
};

/// Dijkstra on summed hop latency; among equal-latency routes the fewest hops win.
inline std::vector<Route> latency_routes(const topology::InterconnectGraph& g, std::size_t src) {
    std::vector<Route> best(g.vertex_count());
    using Item = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    best[src] = {0.0, 0};
    pq.emplace(0.0, 0, src);
    while (!pq.empty()) {
        const auto [lat, hops, v] = pq.top();
        pq.pop();
        if (lat > best[v].latency || (lat == best[v].latency && hops > best[v].hops)) continue;
        for (std::size_t ei : g.incident(v)) {
            const std::size_t w = g.other(ei, v);
            const double nl = lat + g.edge(ei).hop_latency_us;
            const std::size_t nh = hops + 1;
            if (nl < best[w].latency || (nl == best[w].latency && nh < best[w].hops)) {
                best[w] = {nl, nh};
                pq.emplace(nl, nh, w);
            }
        }
    }
    return best;
}

}  // namespace detail

inline LatencyReport simulate_latency(const topology::InterconnectGraph& graph, const TrafficMatrix& traffic) {
    const std::size_t n = graph.vertex_count();
    if (traffic.vertex_count != n) throw domain_error("simulate_latency: traffic and graph sizes differ");
    LatencyReport rep;
    double weight = 0.0;
    double rack_lat = 0.0;
    double rack_hops = 0.0;
    std::size_t next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const auto routes = detail::latency_routes(graph, s);
        for (const auto& r : routes) {
            if (r.hops == topology::unreachable) continue;
            rack_lat += r.latency;
            rack_hops += static_cast<double>(r.hops);
        }
        for (; next < traffic.demands.size() && traffic.demands[next].src == s; ++next) {
            const Demand& d = traffic.demands[next];
            const auto& r = routes[d.dst];
            if (r.hops == topology::unreachable)
                throw domain_error(fmt::format("simulate_latency: demanded pair ({}, {}) is unreachable", d.src, d.dst));
            rep.mean_latency_us += d.weight * r.latency;
            rep.mean_hops += d.weight * static_cast<double>(r.hops);
            rep.tail_latency_us = std::max(rep.tail_latency_us, r.latency);
            weight += d.weight;
        }
    }
    if (weight <= 0.0) throw domain_error("simulate_latency: traffic has no positive demand");
    rep.mean_latency_us /= weight;
    rep.mean_hops /= weight;
    rep.rack_mean_latency_us = rack_lat / static_cast<double>(n * n);
    rep.rack_mean_hops = rack_hops / static_cast<double>(n * n);
    return rep;
}

// ---------------------------------------------------------------------------
// Utilization

struct UtilizationReport {
    std::vector<double> load;       // per edge, at unit demand scale (both directions summed)
    double saturation_scale = 0.0;  // lambda*: demand multiplier saturating the busiest link
    double utilization_efficiency = 0.0;
    double per_pair_rate_gbps = 0.0;  // lambda* x mean demand weight
};

/// Splits every demand evenly over all shortest hop-paths (parallel edges
/// count as distinct paths) and accumulates per-edge load, using per-source
/// path counting rather than explicit enumeration.
inline std::vector<double> shortest_path_loads(const topology::InterconnectGraph& g, const TrafficMatrix& traffic) {
    const std::size_t n = g.vertex_count();
    std::vector<double> load(g.edge_count(), 0.0);
    std::vector<double> demand_to(n);
    std::vector<double> sigma(n);
    std::vector<double> beta(n);
    std::size_t next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(demand_to.begin(), demand_to.end(), 0.0);
        bool any = false;
        for (; next < traffic.demands.size() && traffic.demands[next].src == s; ++next) {
            demand_to[traffic.demands[next].dst] += traffic.demands[next].weight;
            any = true;
        }
        if (!any) continue;
        const auto dist = topology::bfs_distances(g, s);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
        std::fill(sigma.begin(), sigma.end(), 0.0);
        sigma[s] = 1.0;
        for (std::size_t v : order) {
            if (dist[v] == topology::unreachable) continue;
            for (std::size_t ei : g.incident(v)) {
                const std::size_t w = g.other(ei, v);
                if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
            }
        }
        for (std::size_t t = 0; t < n; ++t)
            if (demand_to[t] > 0.0 && dist[t] == topology::unreachable)
                throw domain_error(fmt::format("link_utilization: demanded pair ({}, {}) is unreachable", s, t));
        // beta(w): demand still to be delivered per shortest path reaching w.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t w = *it;
            if (dist[w] == topology::unreachable) {
                beta[w] = 0.0;
                continue;
            }
            double b = demand_to[w] / sigma[w];
            for (std::size_t ei : g.incident(w)) {
                const std::size_t x = g.other(ei, w);
                if (dist[x] == dist[w] + 1) b += beta[x];
            }
            beta[w] = b;
        }
        for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
            const auto& e = g.edge(ei);
            if (dist[e.u] == topology::unreachable) continue;
            if (dist[e.v] == dist[e.u] + 1)
                load[ei] += sigma[e.u] * beta[e.v];
            else if (dist[e.u] == dist[e.v] + 1)
                load[ei] += sigma[e.v] * beta[e.u];
        }
    }
    return load;
}

inline UtilizationReport link_utilization(const topology::InterconnectGraph& graph, const TrafficMatrix& traffic) {
    if (traffic.vertex_count != graph.vertex_count())
        throw domain_error("link_utilization: traffic and graph sizes differ");
    if (graph.edge_count() == 0) throw domain_error("link_utilization: graph has no links");
    for (const auto& e : graph.edges())
        if (!(e.capacity_gbps > 0.0))
            throw config_error(fmt::format("link_utilization: link ({}, {}) has zero capacity", e.u, e.v));
    UtilizationReport rep;
    rep.load = shortest_path_loads(graph, traffic);
    double peak = 0.0;
    for (std::size_t i = 0; i < rep.load.size(); ++i)
        peak = std::max(peak, rep.load[i] / graph.edge(i).capacity_gbps);
    if (!(peak > 0.0)) throw domain_error("link_utilization: traffic places no load on the network");
    rep.saturation_scale = 1.0 / peak;
    double sum = 0.0;
    for (std::size_t i = 0; i < rep.load.size(); ++i)
        sum += rep.saturation_scale * rep.load[i] / graph.edge(i).capacity_gbps;
    rep.utilization_efficiency = sum / static_cast<double>(rep.load.size());
    rep.per_pair_rate_gbps = rep.saturation_scale * traffic.total() / static_cast<double>(traffic.demands.size());
    return rep;
}

// ---------------------------------------------------------------------------
// Speedup

/// Runtime modelled as compute + per-hop communication; compute_ratio is
/// the compute time expressed in hop units.
struct SpeedupModel {
    double compute_ratio = 0.27;
    double baseline_flops = 0.85e9;
};

inline double benchmark_speedup(double h_base, double h_new, const SpeedupModel& model) {
    if (!(h_base > 0.0) || !(h_new > 0.0)) throw domain_error("benchmark_speedup: hop counts must be positive");
    if (!(model.compute_ratio >= 0.0)) throw domain_error("benchmark_speedup: compute_ratio must be >= 0");
    return (model.compute_ratio + h_base) / (model.compute_ratio + h_new);
}

inline double extrapolate_flops(double baseline_flops, double speedup) {
    if (!(baseline_flops > 0.0)) throw domain_error("extrapolate_flops: baseline must be positive");
    if (!(speedup > 0.0)) throw domain_error("extrapolate_flops: speedup must be positive");
    return baseline_flops * speedup;
}

}  // namespace wine::workload
