#pragma once

// Utilization as a growing share of the wired links is converted to
// wireless links on the same rack pairs.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wine/channel.hpp"
#include "wine/coordination.hpp"
#include "wine/geometry.hpp"
#include "wine/random.hpp"
#include "wine/topology.hpp"
#include "wine/workload.hpp"

namespace wine::workload {

struct FractionSweepOptions {
    channel::LinkSpec link = channel::FsoSpec{};
    coordination::AssignmentOptions assignment;
    std::uint64_t seed = 1;
};

struct FractionPoint {
    double fraction = 0.0;
    std::size_t requested = 0;  // links selected for conversion
    std::size_t converted = 0;  // selected links that obtained a wireless path
    topology::InterconnectGraph graph;
    LatencyReport latency;
    UtilizationReport utilization;
    double mean_wireless_capacity_gbps = 0.0;
};

/// Link order in which conversions happen; every fraction takes a prefix, so
/// selections are nested.
inline std::vector<std::size_t> conversion_order(const topology::InterconnectGraph& baseline, std::uint64_t seed) {
    std::vector<std::size_t> order(baseline.edge_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng gen(seed);
    partial_shuffle(order, order.size(), gen);
    return order;
}

/// One point: round(f x E) links are selected and requested through panel
/// assignment in selection order. A served pair swaps its cable for the
/// wireless link; an unserved pair keeps its cable, so the connection count
/// never changes.
inline FractionPoint fraction_point(const topology::InterconnectGraph& baseline, const geometry::Layout& layout,
                                    double fraction, const TrafficMatrix& traffic,
                                    const FractionSweepOptions& opts) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw domain_error(fmt::format("fraction_point: fraction {} outside [0, 1]", fraction));
    FractionPoint pt;
    pt.fraction = fraction;
    const auto order = conversion_order(baseline, opts.seed);
    pt.requested = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(baseline.edge_count())));
    std::vector<bool> selected(baseline.edge_count(), false);
    std::vector<coordination::RackPair> requests;
    for (std::size_t i = 0; i < pt.requested; ++i) {
        selected[order[i]] = true;
        requests.push_back({baseline.edge(order[i]).u, baseline.edge(order[i]).v});
    }
    const auto a = coordination::assign_panels(requests, layout, opts.link, opts.assignment);

    topology::InterconnectGraph g(baseline.vertex_count());
    for (std::size_t i = 0; i < baseline.edge_count(); ++i) {
        if (selected[i]) continue;
        const auto& e = baseline.edge(i);
        g.add_edge(e.u, e.v, e.kind, e.capacity_gbps, e.hop_latency_us);
    }
    double cap = 0.0;
    for (std::size_t i = 0; i < pt.requested; ++i) {
        const auto& e = baseline.edge(order[i]);
        const auto& l = a.links[i];
        if (l.status == coordination::link_status::failed) {
            g.add_edge(e.u, e.v, e.kind, e.capacity_gbps, e.hop_latency_us);
            continue;
        }
        ++pt.converted;
        cap += l.capacity_gbps;
        const auto m = l.status == coordination::link_status::s_wine ? topology::medium::s_wine
                                                                     : topology::medium::r_wine;
        g.add_edge(e.u, e.v, m, l.capacity_gbps, e.hop_latency_us);
    }
    pt.mean_wireless_capacity_gbps = pt.converted ? cap / static_cast<double>(pt.converted) : 0.0;
    pt.latency = simulate_latency(g, traffic);
    pt.utilization = link_utilization(g, traffic);
    pt.graph = std::move(g);
    return pt;
}

inline std::vector<FractionPoint> wireless_fraction_sweep(const topology::InterconnectGraph& baseline,
                                                          const geometry::Layout& layout,
                                                          const std::vector<double>& fractions,
                                                          const TrafficMatrix& traffic,
                                                          const FractionSweepOptions& opts) {
    if (fractions.empty()) throw domain_error("wireless_fraction_sweep: no fractions");
    std::vector<FractionPoint> out;
    out.reserve(fractions.size());
    for (double f : fractions) out.push_back(fraction_point(baseline, layout, f, traffic, opts));
    return out;
}

}  // namespace wine::workload
