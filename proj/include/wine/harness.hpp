#pragma once

// Experiment pipelines behind the CLI: link-budget table, layout dump, IRS
// spacing sweep, coordination sweep, wireless-fraction sweep and the
// single-scenario coordination run.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "wine/channel.hpp"
#include "wine/config.hpp"
#include "wine/coordination.hpp"
#include "wine/error.hpp"
#include "wine/fraction_sweep.hpp"
#include "wine/geometry.hpp"
#include "wine/random.hpp"
#include "wine/report.hpp"
#include "wine/topology.hpp"
#include "wine/workload.hpp"

namespace wine::harness {

// Seed streams, one per pipeline.
inline constexpr std::uint64_t irs_stream = 3;
inline constexpr std::uint64_t fraction_stream = 4;
inline constexpr std::uint64_t traffic_stream = 5;

inline ReportMetadata metadata_for(const ScenarioConfig& cfg) {
    return {cfg.seed, sha256_hex(canonical_config(cfg)), std::string(tool_version)};
}

template <typename F>
auto in_context(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const error& e) {
        throw_error(e.kind(), fmt::format("{}: {}", where, e.what()));
    }
}

inline SweepReport start(const ScenarioConfig& cfg, std::string name, std::vector<std::string> columns) {
    SweepReport r;
    r.name = std::move(name);
    r.columns = std::move(columns);
    r.metadata = metadata_for(cfg);
    return r;
}

// ---------------------------------------------------------------------------
// Link budget table

inline SweepReport run_linkbudget_table(const ScenarioConfig& cfg) {
    SweepReport r = start(cfg, "linkbudget",
                          {"link_type", "frequency_hz", "bandwidth_hz", "distance_m", "loss_db", "noise_dbm",
                           "snr_db", "capacity_gbps", "atmospheric_loss_db", "pointing_loss_db", "misc_loss_db",
                           "antenna_gain_db", "received_power_dbm", "calibration"});
    for (const auto& e : cfg.channel.table) {
        const channel::LinkSpec spec = cfg.channel.spec(e.link);
        const auto b = channel::link_budget(spec, e.distance_m, e.atmospheric_loss_db);
        const double misc = std::visit([](const auto& s) { return s.misc_loss_db; }, spec);
        r.add({std::string(channel::to_string(e.link)), channel::carrier_of(spec), b.bandwidth_hz, e.distance_m,
               b.propagation_or_geometric_loss_db, b.noise_power_dbm, b.snr_db, b.capacity_bps / 1e9,
               b.atmospheric_loss_db, b.pointing_loss_db, b.misc_loss_db, b.antenna_gain_total_db,
               b.received_power_dbm, std::string(misc == 0.0 ? "uncalibrated" : "calibrated")});
    }
    return r;
}

// ---------------------------------------------------------------------------
// Layout

inline geometry::Layout config_layout(const ScenarioConfig& cfg) {
    return geometry::generate_layout(cfg.layout.room, cfg.layout.racks, cfg.layout.irs);
}

inline SweepReport run_layout(const ScenarioConfig& cfg) {
    const auto layout = config_layout(cfg);
    SweepReport r = start(cfg, "layout", {"id", "x", "y", "z", "kind"});
    auto row = [&](std::size_t id, const geometry::Vec3& p, const char* kind) {
        r.add({static_cast<std::int64_t>(id), p.x, p.y, p.z, std::string(kind)});
    };
    for (std::size_t i = 0; i < layout.rack_count(); ++i) row(i, layout.rack_centers[i], "rack");
    for (std::size_t i = 0; i < layout.rack_count(); ++i) row(i, layout.transceivers[i], "transceiver");
    for (std::size_t i = 0; i < layout.panel_count(); ++i) row(i, layout.panels[i], "panel");
    return r;
}

// ---------------------------------------------------------------------------
// IRS sweep

struct IrsPoint {
    bool feasible = true;
    std::string note;
    std::size_t panels = 0;
    std::size_t requests = 0;   // summed over trials
    std::size_t assigned = 0;   // links holding a panel
    std::size_t survivors = 0;  // assigned links outside every collision
    double survivor_capacity_gbps = 0.0;
};

/// One trial: `panel_count` random rack pairs each take the best free panel
/// in request order; afterwards every link caught in a beam collision is
/// ruled out.
inline void irs_trial(const geometry::Layout& layout, const channel::LinkSpec& spec,
                      const geometry::CollisionOptions& opts, std::uint64_t seed, IrsPoint& acc) {
    const std::size_t racks = layout.rack_count();
    const std::size_t want = layout.panel_count();
    if (racks < 2) throw domain_error("irs sweep: need at least two racks");
    rng gen(seed);
    std::vector<std::pair<std::size_t, std::size_t>> requests;
    requests.reserve(want);
    while (requests.size() < want) {
        const auto a = static_cast<std::size_t>(gen.below(racks));
        const auto b = static_cast<std::size_t>(gen.below(racks));
        if (a != b) requests.emplace_back(a, b);
    }
    const double divergence = channel::beam_divergence(spec);
    std::vector<bool> used(layout.panel_count(), false);
    std::vector<geometry::TracedLink> links;
    std::vector<double> caps;
    for (const auto& [src, dst] : requests) {
        for (auto& c : geometry::panel_candidates(layout, src, dst, spec)) {
            if (used[c.panel]) continue;
            used[c.panel] = true;
            links.push_back({std::move(c.path), divergence});
            caps.push_back(c.capacity_bps / 1e9);
            break;
        }
    }
    const auto rep = geometry::detect_collisions(links, opts);
    acc.requests += requests.size();
    acc.assigned += links.size();
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (rep.in_conflict[i]) continue;
        ++acc.survivors;
        acc.survivor_capacity_gbps += caps[i];
    }
}

inline IrsPoint irs_point(const ScenarioConfig& cfg, double height_m, double spacing_m) {
    IrsPoint pt;
    geometry::MachineRoom room = cfg.layout.room;
    room.height = height_m;
    geometry::IrsSpec irs = cfg.layout.irs;
    irs.spacing = spacing_m;
    geometry::Layout layout;
    try {
        layout = geometry::generate_layout(room, cfg.layout.racks, irs);
    } catch (const geometry_error& e) {
        pt.feasible = false;
        pt.note = e.what();
        return pt;
    }
    pt.panels = layout.panel_count();
    const auto spec = cfg.channel.spec(cfg.irs_sweep.link);
    const geometry::CollisionOptions opts{cfg.coordination.exempt_shared_racks};
    const std::uint64_t base = derive_seed(cfg.seed, irs_stream);
    // Every point replays the same request stream (common random numbers).
    for (std::size_t t = 0; t < cfg.irs_sweep.trials; ++t) irs_trial(layout, spec, opts, derive_seed(base, t), pt);
    return pt;
}

inline SweepReport run_irs_sweep(const ScenarioConfig& cfg) {
    if (cfg.irs_sweep.height_m.empty() || cfg.irs_sweep.spacing_m.empty())
        throw config_error("sweep.irs: height and spacing lists must be nonempty");
    SweepReport r = start(cfg, "irs_sweep",
                          {"height_m", "spacing_m", "feasible", "panels", "trials", "requests_per_trial",
                           "assigned_per_trial", "survivors_per_trial", "collision_fraction",
                           "mean_rwine_throughput_gbps", "aggregate_throughput_gbps", "note"});
    const auto trials = static_cast<double>(cfg.irs_sweep.trials);
    for (double h : cfg.irs_sweep.height_m) {
        for (double d : cfg.irs_sweep.spacing_m) {
            const IrsPoint p = in_context(fmt::format("irs sweep (h={}, d_irs={})", h, d),
                                          [&] { return irs_point(cfg, h, d); });
            const double cf = p.assigned ? 1.0 - static_cast<double>(p.survivors) / static_cast<double>(p.assigned)
                                         : 0.0;
            const double mean = p.survivors ? p.survivor_capacity_gbps / static_cast<double>(p.survivors) : 0.0;
            r.add({h, d, std::int64_t{p.feasible}, static_cast<std::int64_t>(p.panels),
                   static_cast<std::int64_t>(cfg.irs_sweep.trials), static_cast<double>(p.requests) / trials,
                   static_cast<double>(p.assigned) / trials, static_cast<double>(p.survivors) / trials, cf, mean,
                   p.survivor_capacity_gbps / trials, p.note});
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Coordination

struct Deployment {
    coordination::CoordinationPlan plan;
    coordination::PanelAssignment assignment;
    topology::InterconnectGraph graph;
    geometry::Layout layout;
};

/// Machine room for a coordination scenario: tori up to three dimensions use
/// the lattice placement, anything else a near-square grid in id order.
inline geometry::Layout scenario_layout(const ScenarioConfig& cfg, const topology::InterconnectGraph& g,
                                        const topology::TopologySpec& spec) {
    if (const auto* t = std::get_if<topology::TorusParams>(&spec.base); t && t->n <= 3)
        return geometry::layout_for_torus(t->k, t->n, cfg.layout.room, cfg.layout.racks, cfg.layout.irs);
    return geometry::layout_for_racks(g.vertex_count(), cfg.layout.room, cfg.layout.racks, cfg.layout.irs);
}

inline geometry::Layout torus_layout(const ScenarioConfig& cfg, int k) {
    return geometry::layout_for_torus(k, 3, cfg.layout.room, cfg.layout.racks, cfg.layout.irs);
}

/// Plans, assigns and deploys wireless links of the given state onto `base`.
inline Deployment coordinate(const ScenarioConfig& cfg, const topology::InterconnectGraph& base,
                             const geometry::Layout& layout, coordination::state target) {
    Deployment d;
    const std::size_t n = base.vertex_count();
    d.layout = layout;
    const std::size_t budget = cfg.coordination.budget_for(n);
    switch (target) {
    case coordination::state::dispersed: d.plan = coordination::plan_dispersed(base, budget, &d.layout); break;
    case coordination::state::cohesive:
        d.plan = coordination::plan_cohesive(base, budget, cfg.coordination.hub_count);
        break;
    case coordination::state::mixed:
        throw config_error("coordination.state_target: mixed has no construction, it is only a classification");
    }
    const coordination::AssignmentOptions opts{cfg.coordination.allow_swine, {cfg.coordination.exempt_shared_racks}};
    d.assignment = coordination::assign_panels(d.plan.pairs, d.layout, cfg.channel.spec(cfg.coordination.link), opts);
    d.graph = coordination::deploy(base, d.assignment, cfg.topology.link.hop_latency_us);
    return d;
}

inline SweepReport assignment_report(const ScenarioConfig& cfg, const coordination::PanelAssignment& a) {
    SweepReport r = start(cfg, "assignment", {"src", "dst", "medium", "panel_id", "capacity_gbps", "status"});
    for (const auto& l : a.links) {
        const bool failed = l.status == coordination::link_status::failed;
        r.add({static_cast<std::int64_t>(l.pair.src), static_cast<std::int64_t>(l.pair.dst),
               std::string(failed ? "-" : coordination::to_string(l.status)),
               l.panel ? Cell{static_cast<std::int64_t>(*l.panel)} : Cell{std::string("-")}, l.capacity_gbps,
               std::string(failed ? "failed" : "ok")});
    }
    return r;
}

inline SweepReport topology_report(const ScenarioConfig& cfg, const topology::InterconnectGraph& g) {
    SweepReport r = start(cfg, "topology", {"src", "dst", "medium", "capacity_gbps", "latency_us"});
    for (const auto& e : g.edges())
        r.add({static_cast<std::int64_t>(e.u), static_cast<std::int64_t>(e.v), std::string(topology::to_string(e.kind)),
               e.capacity_gbps, e.hop_latency_us});
    return r;
}

/// The `coordinate` subcommand: configured topology and state.
inline std::vector<SweepReport> run_coordinate(const ScenarioConfig& cfg) {
    return in_context("coordinate", [&] {
        const auto base = topology::build_topology(cfg.topology);
        const auto d = coordinate(cfg, base, scenario_layout(cfg, base, cfg.topology), cfg.coordination.target);
        return std::vector<SweepReport>{assignment_report(cfg, d.assignment), topology_report(cfg, d.graph)};
    });
}

inline double mean_wireless_capacity(const topology::InterconnectGraph& g) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : g.edges()) {
        if (!topology::is_wireless(e.kind)) continue;
        sum += e.capacity_gbps;
        ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

inline SweepReport run_coordination_sweep(const ScenarioConfig& cfg) {
    if (cfg.coordination_k.empty()) throw config_error("sweep.coordination.k: list must be nonempty");
    SweepReport r = start(cfg, "coordination",
                          {"k", "state", "pattern", "planned_links", "wireless_links", "classified_state",
                           "mean_wireless_capacity_gbps", "mean_hops", "rack_mean_hops", "mean_latency_us",
                           "tail_latency_us", "rack_mean_latency_us", "utilization_efficiency",
                           "per_pair_rate_gbps", "speedup", "extrapolated_gflops"});
    const std::uint64_t traffic_seed = derive_seed(cfg.seed, traffic_stream);
    for (int k : cfg.coordination_k) {
        const auto base = topology::build_torus(k, 3, cfg.topology.link);
        const auto layout = torus_layout(cfg, k);
        std::vector<workload::TrafficMatrix> traffic;
        std::vector<double> base_hops;
        for (auto p : cfg.workload.patterns) traffic.push_back(workload::traffic_matrix(p, base, traffic_seed));

        auto emit = [&](const std::string& state, const topology::InterconnectGraph& g, std::size_t planned,
                        const std::string& classified) {
            for (std::size_t i = 0; i < traffic.size(); ++i) {
                const auto lat = workload::simulate_latency(g, traffic[i]);
                const auto util = workload::link_utilization(g, traffic[i]);
                if (state == "baseline") base_hops.push_back(lat.mean_hops);
                const double s = workload::benchmark_speedup(base_hops[i], lat.mean_hops, cfg.workload.speedup);
                r.add({std::int64_t{k}, state, std::string(workload::to_string(traffic[i].tag)),
                       static_cast<std::int64_t>(planned), static_cast<std::int64_t>(g.wireless_edge_count()),
                       classified, mean_wireless_capacity(g), lat.mean_hops, lat.rack_mean_hops,
                       lat.mean_latency_us, lat.tail_latency_us, lat.rack_mean_latency_us,
                       util.utilization_efficiency, util.per_pair_rate_gbps, s,
                       workload::extrapolate_flops(cfg.workload.speedup.baseline_flops, s) / 1e9});
            }
        };
        in_context(fmt::format("coordination sweep (k={}, state=baseline)", k), [&] { emit("baseline", base, 0, "-"); });
        for (auto st : {coordination::state::dispersed, coordination::state::cohesive}) {
            in_context(fmt::format("coordination sweep (k={}, state={})", k, coordination::to_string(st)), [&] {
                const auto d = coordinate(cfg, base, layout, st);
                const std::string cls = d.graph.wireless_edge_count()
                                            ? coordination::to_string(
                                                  coordination::classify_state(d.graph, cfg.coordination.thresholds))
                                            : "-";
                emit(coordination::to_string(st), d.graph, d.plan.pairs.size(), cls);
            });
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Wireless fraction sweep

inline SweepReport run_fraction_sweep(const ScenarioConfig& cfg) {
    const auto& fs = cfg.fraction_sweep;
    if (fs.fractions.empty()) throw config_error("sweep.fraction.fractions: list must be nonempty");
    SweepReport r = start(cfg, "utilization",
                          {"k", "state", "fraction", "pattern", "requested_links", "wireless_links", "failed_links",
                           "mean_wireless_capacity_gbps", "mean_latency_us", "utilization_efficiency",
                           "per_pair_rate_gbps"});
    return in_context(fmt::format("fraction sweep (k={})", fs.k), [&] {
        const auto base = topology::build_torus(fs.k, 3, cfg.topology.link);
        const auto layout = torus_layout(cfg, fs.k);
        const auto tm = workload::traffic_matrix(fs.traffic, base, derive_seed(cfg.seed, traffic_stream));
        const workload::FractionSweepOptions opts{
            cfg.channel.spec(cfg.coordination.link),
            {cfg.coordination.allow_swine, {cfg.coordination.exempt_shared_racks}},
            derive_seed(cfg.seed, fraction_stream)};
        const std::string pattern = workload::to_string(fs.traffic);
        const auto lat = workload::simulate_latency(base, tm);
        const auto util = workload::link_utilization(base, tm);
        r.add({std::int64_t{fs.k}, std::string("baseline"), 0.0, pattern, std::int64_t{0}, std::int64_t{0},
               std::int64_t{0}, 0.0, lat.mean_latency_us, util.utilization_efficiency, util.per_pair_rate_gbps});
        for (const auto& pt : workload::wireless_fraction_sweep(base, layout, fs.fractions, tm, opts))
            r.add({std::int64_t{fs.k}, std::string("wireless"), pt.fraction, pattern,
                   static_cast<std::int64_t>(pt.requested), static_cast<std::int64_t>(pt.converted),
                   static_cast<std::int64_t>(pt.requested - pt.converted), pt.mean_wireless_capacity_gbps,
                   pt.latency.mean_latency_us, pt.utilization.utilization_efficiency,
                   pt.utilization.per_pair_rate_gbps});
        return r;
    });
}

/// Everything `simulate` reports.
inline std::vector<SweepReport> run_simulate(const ScenarioConfig& cfg) {
    return {run_coordination_sweep(cfg), run_fraction_sweep(cfg)};
}

inline std::vector<SweepReport> run_all(const ScenarioConfig& cfg) {
    std::vector<SweepReport> out{run_linkbudget_table(cfg), run_layout(cfg), run_irs_sweep(cfg)};
    for (auto& r : run_coordinate(cfg)) out.push_back(std::move(r));
    for (auto& r : run_simulate(cfg)) out.push_back(std::move(r));
    return out;
}

}  // namespace wine::harness
