#pragma once

// Wireless link planning (dispersed / cohesive states), best-effort IRS
// panel assignment, deployment onto the wired baseline, and state
// classification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "wine/channel.hpp"
#include "wine/error.hpp"
#include "wine/geometry.hpp"
#include "wine/topology.hpp"

namespace wine::coordination {

enum class state { dispersed, cohesive, mixed };

inline const char* to_string(state s) {
    switch (s) {
    case state::dispersed: return "dispersed";
    case state::cohesive: return "cohesive";
    case state::mixed: return "mixed";
    }
    return "?";
}

struct RackPair {
    std::size_t src = 0;
    std::size_t dst = 0;
    friend bool operator==(const RackPair&, const RackPair&) = default;
};

struct CoordinationPlan {
    state target = state::dispersed;
    std::size_t budget = 0;
    std::size_t hub_count = 0;
    std::vector<std::size_t> hubs;
    std::vector<RackPair> pairs;
};

namespace detail {

inline bool wired_only(const topology::Edge& e) { return e.kind == topology::medium::wired; }

inline std::vector<std::vector<std::size_t>> wired_distances(const topology::InterconnectGraph& g) {
    std::vector<std::vector<std::size_t>> d(g.vertex_count());
    for (std::size_t s = 0; s < g.vertex_count(); ++s) d[s] = topology::bfs_distances(g, s, wired_only);
    return d;
}

}  // namespace detail

/// Spreads wireless links over rack pairs two wired hops apart (three once
/// those run out), sweeping racks in id order so wireless degree stays level.
/// Among equally loaded partners the physically nearest one wins when a
/// layout is given, then the lowest id.
inline CoordinationPlan plan_dispersed(const topology::InterconnectGraph& graph, std::size_t budget,
                                       const geometry::Layout* layout = nullptr) {
    CoordinationPlan plan;
    plan.target = state::dispersed;
    plan.budget = budget;
    if (budget == 0) return plan;
    const std::size_t n = graph.vertex_count();
    if (layout && layout->rack_count() < n)
        throw domain_error(fmt::format("plan_dispersed: layout has {} racks for {} vertices", layout->rack_count(), n));
    const auto dist = detail::wired_distances(graph);
    auto span = [&](std::size_t a, std::size_t b) {
        return layout ? geometry::distance(layout->transceivers[a], layout->transceivers[b]) : 0.0;
    };
    std::vector<std::size_t> wdeg(n, 0);
    std::vector<std::vector<bool>> taken(n, std::vector<bool>(n, false));

    for (std::size_t target : {std::size_t{2}, std::size_t{3}}) {
        for (std::size_t level = 0; level <= n; ++level) {
            bool made = false;
            for (std::size_t v = 0; v < n; ++v) {
                if (plan.pairs.size() == budget) return plan;
                if (wdeg[v] > level) continue;
                std::optional<std::size_t> best;
                for (std::size_t u = 0; u < n; ++u) {
                    if (dist[v][u] != target || taken[v][u] || wdeg[u] > level) continue;
                    if (!best || wdeg[u] < wdeg[*best] || (wdeg[u] == wdeg[*best] && span(v, u) < span(v, *best)))
                        best = u;
                }
                if (!best) continue;
                taken[v][*best] = taken[*best][v] = true;
                ++wdeg[v];
                ++wdeg[*best];
                plan.pairs.push_back({v, *best});
                made = true;
            }
            if (made) continue;
            bool any_left = false;
            for (std::size_t v = 0; v < n && !any_left; ++v)
                for (std::size_t u = v + 1; u < n && !any_left; ++u)
                    any_left = dist[v][u] == target && !taken[v][u];
            if (!any_left) break;
        }
    }
    if (plan.pairs.size() < budget)
        throw domain_error(fmt::format("plan_dispersed: only {} candidate pairs at wired distance 2-3, budget is {}",
                                       plan.pairs.size(), budget));
    return plan;
}

/// Greedy farthest-point hub selection over wired hop distance, starting
/// from rack 0; ties go to the lower id.
inline std::vector<std::size_t> select_hubs(const topology::InterconnectGraph& graph, std::size_t hub_count) {
    const std::size_t n = graph.vertex_count();
    if (hub_count == 0 || hub_count > n)
        throw domain_error(fmt::format("select_hubs: hub_count {} must lie in [1, {}]", hub_count, n));
    std::vector<std::size_t> hubs{0};
    std::vector<std::size_t> nearest = topology::bfs_distances(graph, 0, detail::wired_only);
    std::vector<bool> is_hub(n, false);
    is_hub[0] = true;
    while (hubs.size() < hub_count) {
        std::size_t best = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (is_hub[v]) continue;
            if (best == n || nearest[v] > nearest[best]) best = v;
        }
        hubs.push_back(best);
        is_hub[best] = true;
        const auto d = topology::bfs_distances(graph, best, detail::wired_only);
        for (std::size_t v = 0; v < n; ++v) nearest[v] = std::min(nearest[v], d[v]);
    }
    return hubs;
}

/// Hubs are wired pairwise first; remaining budget goes round-robin to each
/// hub's currently farthest non-neighbour, measured on the graph augmented
/// with every link planned so far.
inline CoordinationPlan plan_cohesive(const topology::InterconnectGraph& graph, std::size_t budget,
                                      std::size_t hub_count) {
    const std::size_t n = graph.vertex_count();
    if (hub_count == 0 || hub_count > n)
        throw domain_error(fmt::format("plan_cohesive: hub_count {} must lie in [1, {}]", hub_count, n));
    const std::size_t hub_links = hub_count * (hub_count - 1) / 2;
    if (budget < hub_count || budget < hub_links)
        throw domain_error(fmt::format("plan_cohesive: budget {} cannot cover {} hubs ({} hub-hub links)", budget,
                                       hub_count, hub_links));
    CoordinationPlan plan;
    plan.target = state::cohesive;
    plan.budget = budget;
    plan.hub_count = hub_count;
    plan.hubs = select_hubs(graph, hub_count);

    topology::InterconnectGraph g = graph.filtered(detail::wired_only);
    auto add = [&](std::size_t a, std::size_t b) {
        plan.pairs.push_back({a, b});
        g.add_edge(a, b, topology::medium::s_wine, 1.0, 0.0);
    };
    for (std::size_t i = 0; i < plan.hubs.size(); ++i)
        for (std::size_t j = i + 1; j < plan.hubs.size(); ++j) add(plan.hubs[i], plan.hubs[j]);

    while (plan.pairs.size() < budget) {
        bool made = false;
        for (std::size_t h : plan.hubs) {
            if (plan.pairs.size() == budget) break;
            const auto d = topology::bfs_distances(g, h);
            std::optional<std::size_t> best;
            for (std::size_t v = 0; v < n; ++v) {
                if (v == h || g.adjacent(h, v)) continue;
                if (!best || d[v] > d[*best]) best = v;
            }
            if (!best) continue;
            add(h, *best);
            made = true;
        }
        if (!made)
            throw domain_error(fmt::format("plan_cohesive: hubs saturated after {} links, budget is {}",
                                           plan.pairs.size(), budget));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Best-effort panel assignment

enum class link_status { s_wine, r_wine, failed };

inline const char* to_string(link_status s) {
    switch (s) {
    case link_status::s_wine: return "s-WINE";
    case link_status::r_wine: return "r-WINE";
    case link_status::failed: return "failed";
    }
    return "?";
}

struct LinkAssignment {
    RackPair pair;
    link_status status = link_status::failed;
    std::optional<std::size_t> panel;
    double capacity_gbps = 0.0;
    std::optional<geometry::WirelessPath> path;
};

struct PanelAssignment {
    std::vector<LinkAssignment> links;

    std::size_t succeeded() const {
        return static_cast<std::size_t>(std::count_if(links.begin(), links.end(), [](const LinkAssignment& l) {
            return l.status != link_status::failed;
        }));
    }

    std::vector<geometry::TracedLink> committed(double divergence_rad) const {
        std::vector<geometry::TracedLink> out;
        for (const auto& l : links)
            if (l.path) out.push_back({*l.path, divergence_rad});
        return out;
    }
};

struct AssignmentOptions {
    bool allow_swine = true;
    geometry::CollisionOptions collisions;
};

/// Requests are served in order. Each takes an unobstructed, collision-free
/// s-WINE path when one exists, else the highest-capacity free panel whose
/// beams clear every committed beam, else it fails.
inline PanelAssignment assign_panels(std::span<const RackPair> requests, const geometry::Layout& layout,
                                     const channel::LinkSpec& spec, const AssignmentOptions& opts = {}) {
    const double divergence = channel::beam_divergence(spec);
    PanelAssignment out;
    out.links.reserve(requests.size());
    std::vector<geometry::TracedLink> committed;
    std::vector<bool> panel_used(layout.panel_count(), false);

    auto clear_of_committed = [&](const geometry::WirelessPath& p) {
        const geometry::TracedLink candidate{p, divergence};
        return std::none_of(committed.begin(), committed.end(), [&](const geometry::TracedLink& c) {
            return geometry::links_conflict(candidate, c, opts.collisions);
        });
    };

    for (const RackPair& req : requests) {
        LinkAssignment a;
        a.pair = req;
        if (opts.allow_swine) {
            if (auto p = geometry::swine_path(layout, req.src, req.dst); p && clear_of_committed(*p)) {
                a.status = link_status::s_wine;
                a.capacity_gbps = channel::capacity_gbps(spec, p->total_length);
                a.path = std::move(p);
            }
        }
        if (a.status == link_status::failed) {
            for (auto& c : geometry::panel_candidates(layout, req.src, req.dst, spec)) {
                if (panel_used[c.panel] || !clear_of_committed(c.path)) continue;
                a.status = link_status::r_wine;
                a.panel = c.panel;
                a.capacity_gbps = c.capacity_bps / 1e9;
                panel_used[c.panel] = true;
                a.path = std::move(c.path);
                break;
            }
        }
        if (a.path) committed.push_back({*a.path, divergence});
        out.links.push_back(std::move(a));
    }
    return out;
}

/// Adds one wireless edge per successful assignment; failed links add nothing.
inline topology::InterconnectGraph deploy(const topology::InterconnectGraph& graph, const PanelAssignment& assignment,
                                          double hop_latency_us) {
    topology::InterconnectGraph out = graph;
    for (const auto& l : assignment.links) {
        if (l.status == link_status::failed) continue;
        const auto m = l.status == link_status::s_wine ? topology::medium::s_wine : topology::medium::r_wine;
        out.add_edge(l.pair.src, l.pair.dst, m, l.capacity_gbps, hop_latency_us);
    }
    return out;
}

struct ClassificationThresholds {
    double dispersed_below = 0.05;  // CV of vertex degree
    double cohesive_above = 0.25;
};

inline double degree_cv(const topology::InterconnectGraph& graph) {
    const std::size_t n = graph.vertex_count();
    if (n == 0) return 0.0;
    double mean = 0.0;
    for (std::size_t v = 0; v < n; ++v) mean += static_cast<double>(graph.degree(v));
    mean /= static_cast<double>(n);
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        const double d = static_cast<double>(graph.degree(v)) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    return std::sqrt(var) / mean;
}

inline state classify_state(const topology::InterconnectGraph& graph, const ClassificationThresholds& t = {}) {
    if (graph.wireless_edge_count() == 0) throw domain_error("classify_state: nothing to classify");
    const double cv = degree_cv(graph);
    if (cv < t.dispersed_below) return state::dispersed;
    if (cv > t.cohesive_above) return state::cohesive;
    return state::mixed;
}

}  // namespace wine::coordination
