#pragma once

// Scenario configuration. A user document is merge-patched over the
// built-in defaults and the result is parsed strictly: unknown keys, wrong
// types and explicitly nulled fields are config errors naming the field.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "wine/channel.hpp"
#include "wine/coordination.hpp"
#include "wine/error.hpp"
#include "wine/geometry.hpp"
#include "wine/topology.hpp"
#include "wine/workload.hpp"

namespace wine {

using json = nlohmann::json;

struct TableEntry {
    channel::link_type link = channel::link_type::thz;
    double distance_m = 0.0;
    std::optional<double> atmospheric_loss_db;
};

struct ChannelConfig {
    channel::ThzSpec thz;
    channel::FsoSpec fso;
    std::vector<TableEntry> table;

    channel::LinkSpec spec(channel::link_type t) const {
        if (t == channel::link_type::thz) return thz;
        return fso;
    }
};

struct LayoutConfig {
    geometry::MachineRoom room;
    geometry::RackGrid racks;
    geometry::IrsSpec irs;
};

struct CoordinationConfig {
    coordination::state target = coordination::state::cohesive;
    channel::link_type link = channel::link_type::fso;
    std::optional<std::size_t> budget;  // vertex count / 2 when unset
    std::size_t hub_count = 4;
    coordination::ClassificationThresholds thresholds;
    bool allow_swine = true;
    bool exempt_shared_racks = true;

    std::size_t budget_for(std::size_t vertex_count) const { return budget ? *budget : vertex_count / 2; }
};

struct WorkloadConfig {
    std::vector<workload::pattern> patterns;
    workload::SpeedupModel speedup;
};

struct IrsSweepConfig {
    std::vector<double> spacing_m;
    std::vector<double> height_m;
    channel::link_type link = channel::link_type::thz;
    std::size_t trials = 100;
};

struct FractionSweepConfig {
    int k = 6;
    std::vector<double> fractions;
    workload::pattern traffic = workload::pattern::alltoall;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::string output_dir;
    ChannelConfig channel;
    LayoutConfig layout;
    topology::TopologySpec topology;
    CoordinationConfig coordination;
    WorkloadConfig workload;
    IrsSweepConfig irs_sweep;
    std::vector<int> coordination_k;
    FractionSweepConfig fraction_sweep;
    json document;  // effective document, used for the digest
};

inline json default_config_document() {
    const channel::ThzSpec thz;
    const channel::FsoSpec fso;
    return json::parse(fmt::format(R"({{
  "seed": 1,
  "output_dir": "wine-out",
  "channel": {{
    "thz": {{
      "carrier_frequency_hz": {}, "bandwidth_hz": {}, "tx_power_dbm": {},
      "elements_per_side": {}, "element_gain_dbi": {}, "noise_figure_db": {},
      "atmospheric_attenuation_db_per_m": {}, "misc_loss_db": {},
      "beam_divergence_rad": {}, "modulation": "{}"
    }},
    "fso": {{
      "carrier_frequency_hz": {}, "bandwidth_hz": {}, "tx_power_dbm": {},
      "lens_diameter_m": {}, "divergence_half_angle_rad": {}, "pointing_loss_db": {},
      "noise_power_override_dbm": {}, "noise_figure_db": {}, "misc_loss_db": {},
      "modulation": "{}"
    }},
    "table": [
      {{"link": "thz", "distance_m": 2.0}},
      {{"link": "thz", "distance_m": 28.28, "atmospheric_loss_db": 0.034}},
      {{"link": "fso", "distance_m": 2.0}},
      {{"link": "fso", "distance_m": 28.28}}
    ]
  }},
  "layout": {{
    "room": {{"length_m": 20.0, "width_m": 20.0, "height_m": 5.5}},
    "racks": {{"rows": 10, "cols": 10, "pitch_m": 2.0, "footprint_x_m": 0.6, "footprint_y_m": 1.2,
               "height_m": 2.0, "mount_offset_m": 0.2}},
    "irs": {{"extent_x_m": 18.0, "extent_y_m": 18.0, "spacing_m": 1.8}}
  }},
  "topology": {{
    "kind": "torus",
    "torus": {{"k": 4, "n": 3}},
    "fat_tree": {{"r": 2, "levels": 3}},
    "dragonfly": {{"a": 4, "h": 2, "g": 9}},
    "shortcuts": 0,
    "wired_capacity_gbps": 200.0,
    "hop_latency_us": 0.6
  }},
  "coordination": {{
    "state_target": "cohesive",
    "link": "fso",
    "hub_count": 4,
    "thresholds": {{"dispersed_below": 0.05, "cohesive_above": 0.25}},
    "allow_swine": true,
    "exempt_shared_racks": true
  }},
  "workload": {{
    "patterns": ["neighbor", "alltoall", "random_perm"],
    "compute_ratio": 0.27,
    "baseline_flops": 0.85e9
  }},
  "sweep": {{
    "irs": {{"spacing_m": [1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 3.3, 3.5], "height_m": [5.5, 7.5, 9.5],
             "link": "thz", "trials": 100}},
    "coordination": {{"k": [4, 6, 8]}},
    "fraction": {{"k": 6, "fractions": [0.1, 0.2, 0.3, 0.4, 0.5], "pattern": "alltoall"}}
  }}
}})",
                                   thz.carrier_frequency_hz, thz.bandwidth_hz, thz.tx_power_dbm,
                                   thz.elements_per_side, thz.element_gain_dbi, thz.noise_figure_db,
                                   thz.atmospheric_attenuation_db_per_m, thz.misc_loss_db, thz.beam_divergence_rad,
                                   thz.modulation, fso.carrier_frequency_hz, fso.bandwidth_hz, fso.tx_power_dbm,
                                   fso.lens_diameter_m, fso.divergence_half_angle_rad, fso.pointing_loss_db,
                                   fso.noise_power_override_dbm, fso.noise_figure_db, fso.misc_loss_db,
                                   fso.modulation));
}

namespace detail {

/// Strict reader over one JSON object; every key must be consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(fmt::format("{}: expected an object", where()));
    }

    template <typename T>
    T get(const std::string& key) {
        const json& v = at(key);
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            throw config_error(fmt::format("{}: wrong type ({})", name(key), v.type_name()));
        }
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw config_error(fmt::format("{}: expected a number", name(key)));
        return v.get<double>();
    }

    double positive(const std::string& key) {
        const double x = number(key);
        if (!(x > 0.0)) throw config_error(fmt::format("{}: must be > 0 (got {})", name(key), x));
        return x;
    }

    std::uint64_t count(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw config_error(fmt::format("{}: expected a non-negative integer", name(key)));
        return v.get<std::uint64_t>();
    }

    int integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) throw config_error(fmt::format("{}: expected an integer", name(key)));
        return v.get<int>();
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!j_.contains(key)) return std::nullopt;
        return number(key);
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Reader child(const std::string& key) { return Reader(at(key), name(key)); }

    const json& raw(const std::string& key) { return at(key); }

    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw config_error(fmt::format("{}: unknown field", name(it.key())));
    }

private:
    const json& at(const std::string& key) {
        if (!j_.contains(key)) throw config_error(fmt::format("{}: missing field", name(key)));
        const json& v = j_.at(key);
        if (v.is_null()) throw config_error(fmt::format("{}: missing field", name(key)));
        seen_.insert(key);
        return v;
    }

    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline channel::link_type parse_link(const std::string& s, const std::string& field) {
    if (s == "thz") return channel::link_type::thz;
    if (s == "fso") return channel::link_type::fso;
    throw config_error(fmt::format("{}: unknown link '{}' (expected thz or fso)", field, s));
}

inline std::vector<double> number_list(Reader& r, const std::string& key) {
    const json& v = r.raw(key);
    if (!v.is_array() || v.empty()) throw config_error(fmt::format("{}: expected a nonempty list", r.name(key)));
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw config_error(fmt::format("{}: expected numbers", r.name(key)));
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace detail

inline const char* link_key(channel::link_type t) { return t == channel::link_type::thz ? "thz" : "fso"; }

/// Parses an effective (already merged) document.
inline ScenarioConfig parse_config(const json& doc) {
    using detail::Reader;
    ScenarioConfig c;
    c.document = doc;
    Reader root(doc, "");
    c.seed = root.count("seed");
    c.output_dir = root.get<std::string>("output_dir");

    {
        Reader ch = root.child("channel");
        Reader t = ch.child("thz");
        auto& thz = c.channel.thz;
        thz.carrier_frequency_hz = t.number("carrier_frequency_hz");
        thz.bandwidth_hz = t.number("bandwidth_hz");
        thz.tx_power_dbm = t.number("tx_power_dbm");
        thz.elements_per_side = t.integer("elements_per_side");
        thz.element_gain_dbi = t.number("element_gain_dbi");
        thz.noise_figure_db = t.number("noise_figure_db");
        thz.atmospheric_attenuation_db_per_m = t.number("atmospheric_attenuation_db_per_m");
        thz.misc_loss_db = t.number("misc_loss_db");
        thz.beam_divergence_rad = t.number("beam_divergence_rad");
        thz.spectral_efficiency_cap = t.optional_number("spectral_efficiency_cap");
        thz.modulation = t.get<std::string>("modulation");
        t.finish();
        thz.validate();

        Reader f = ch.child("fso");
        auto& fso = c.channel.fso;
        fso.carrier_frequency_hz = f.number("carrier_frequency_hz");
        fso.bandwidth_hz = f.number("bandwidth_hz");
        fso.tx_power_dbm = f.number("tx_power_dbm");
        fso.lens_diameter_m = f.number("lens_diameter_m");
        fso.divergence_half_angle_rad = f.number("divergence_half_angle_rad");
        fso.pointing_loss_db = f.number("pointing_loss_db");
        fso.noise_power_override_dbm = f.number("noise_power_override_dbm");
        fso.noise_figure_db = f.number("noise_figure_db");
        fso.misc_loss_db = f.number("misc_loss_db");
        fso.spectral_efficiency_cap = f.optional_number("spectral_efficiency_cap");
        fso.modulation = f.get<std::string>("modulation");
        f.finish();
        fso.validate();

        const json& table = ch.raw("table");
        if (!table.is_array() || table.empty()) throw config_error("channel.table: expected a nonempty list");
        for (std::size_t i = 0; i < table.size(); ++i) {
            Reader e(table[i], fmt::format("channel.table[{}]", i));
            TableEntry entry;
            entry.link = detail::parse_link(e.get<std::string>("link"), e.name("link"));
            entry.distance_m = e.positive("distance_m");
            entry.atmospheric_loss_db = e.optional_number("atmospheric_loss_db");
            e.finish();
            c.channel.table.push_back(entry);
        }
        ch.finish();
    }

    {
        Reader l = root.child("layout");
        Reader room = l.child("room");
        c.layout.room = {room.positive("length_m"), room.positive("width_m"), room.positive("height_m")};
        room.finish();
        Reader r = l.child("racks");
        auto& g = c.layout.racks;
        g.rows = r.integer("rows");
        g.cols = r.integer("cols");
        g.pitch = r.positive("pitch_m");
        g.footprint_x = r.positive("footprint_x_m");
        g.footprint_y = r.positive("footprint_y_m");
        g.rack_height = r.positive("height_m");
        g.mount_offset = r.number("mount_offset_m");
        r.finish();
        if (g.rows < 1 || g.cols < 1) throw config_error("layout.racks: rows and cols must be >= 1");
        Reader irs = l.child("irs");
        c.layout.irs = {irs.positive("extent_x_m"), irs.positive("extent_y_m"), irs.positive("spacing_m")};
        irs.finish();
        l.finish();
    }

    {
        Reader t = root.child("topology");
        const auto kind = t.get<std::string>("kind");
        Reader torus = t.child("torus");
        const topology::TorusParams tp{torus.integer("k"), torus.integer("n")};
        torus.finish();
        Reader ft = t.child("fat_tree");
        const topology::FatTreeParams fp{ft.integer("r"), ft.integer("levels")};
        ft.finish();
        Reader df = t.child("dragonfly");
        const topology::DragonflyParams dp{df.integer("a"), df.integer("h"), df.integer("g")};
        df.finish();
        if (kind == "torus")
            c.topology.base = tp;
        else if (kind == "fat_tree")
            c.topology.base = fp;
        else if (kind == "dragonfly")
            c.topology.base = dp;
        else
            throw config_error(fmt::format("topology.kind: unknown kind '{}' (torus, fat_tree, dragonfly)", kind));
        c.topology.shortcuts = t.count("shortcuts");
        c.topology.seed = derive_seed(c.seed, 1);
        c.topology.link.capacity_gbps = t.positive("wired_capacity_gbps");
        c.topology.link.hop_latency_us = t.positive("hop_latency_us");
        t.finish();
    }

    {
        Reader co = root.child("coordination");
        const auto target = co.get<std::string>("state_target");
        if (target == "dispersed")
            c.coordination.target = coordination::state::dispersed;
        else if (target == "cohesive")
            c.coordination.target = coordination::state::cohesive;
        else if (target == "mixed")
            c.coordination.target = coordination::state::mixed;
        else
            throw config_error(fmt::format("coordination.state_target: unknown state '{}'", target));
        c.coordination.link = detail::parse_link(co.get<std::string>("link"), "coordination.link");
        if (co.has("budget")) c.coordination.budget = co.count("budget");
        c.coordination.hub_count = co.count("hub_count");
        if (c.coordination.hub_count < 1) throw config_error("coordination.hub_count: must be >= 1");
        Reader th = co.child("thresholds");
        c.coordination.thresholds = {th.number("dispersed_below"), th.number("cohesive_above")};
        th.finish();
        if (!(c.coordination.thresholds.dispersed_below <= c.coordination.thresholds.cohesive_above))
            throw config_error("coordination.thresholds: dispersed_below must not exceed cohesive_above");
        c.coordination.allow_swine = co.get<bool>("allow_swine");
        c.coordination.exempt_shared_racks = co.get<bool>("exempt_shared_racks");
        co.finish();
    }

    {
        Reader w = root.child("workload");
        const json& pats = w.raw("patterns");
        if (!pats.is_array() || pats.empty()) throw config_error("workload.patterns: expected a nonempty list");
        for (const auto& p : pats) {
            if (!p.is_string()) throw config_error("workload.patterns: expected pattern names");
            try {
                c.workload.patterns.push_back(workload::parse_pattern(p.get<std::string>()));
            } catch (const config_error& e) {
                throw config_error(fmt::format("workload.patterns: {}", e.what()));
            }
        }
        c.workload.speedup.compute_ratio = w.number("compute_ratio");
        if (!(c.workload.speedup.compute_ratio >= 0.0)) throw config_error("workload.compute_ratio: must be >= 0");
        c.workload.speedup.baseline_flops = w.positive("baseline_flops");
        w.finish();
    }

    {
        Reader s = root.child("sweep");
        Reader irs = s.child("irs");
        c.irs_sweep.spacing_m = detail::number_list(irs, "spacing_m");
        c.irs_sweep.height_m = detail::number_list(irs, "height_m");
        c.irs_sweep.link = detail::parse_link(irs.get<std::string>("link"), "sweep.irs.link");
        c.irs_sweep.trials = irs.count("trials");
        if (c.irs_sweep.trials < 1) throw config_error("sweep.irs.trials: must be >= 1");
        irs.finish();
        for (double d : c.irs_sweep.spacing_m)
            if (!(d > 0.0)) throw config_error("sweep.irs.spacing_m: spacings must be > 0");
        for (double h : c.irs_sweep.height_m)
            if (!(h > 0.0)) throw config_error("sweep.irs.height_m: heights must be > 0");

        Reader co = s.child("coordination");
        const json& ks = co.raw("k");
        if (!ks.is_array() || ks.empty()) throw config_error("sweep.coordination.k: expected a nonempty list");
        for (const auto& k : ks) {
            if (!k.is_number_integer() || k.get<int>() < 3)
                throw config_error("sweep.coordination.k: entries must be integers >= 3");
            c.coordination_k.push_back(k.get<int>());
        }
        co.finish();

        Reader fr = s.child("fraction");
        c.fraction_sweep.k = fr.integer("k");
        if (c.fraction_sweep.k < 3) throw config_error("sweep.fraction.k: must be >= 3");
        c.fraction_sweep.fractions = detail::number_list(fr, "fractions");
        for (double f : c.fraction_sweep.fractions)
            if (!(f > 0.0 && f <= 1.0)) throw config_error("sweep.fraction.fractions: entries must lie in (0, 1]");
        try {
            c.fraction_sweep.traffic = workload::parse_pattern(fr.get<std::string>("pattern"));
        } catch (const config_error& e) {
            throw config_error(fmt::format("sweep.fraction.pattern: {}", e.what()));
        }
        fr.finish();
        s.finish();
    }
    root.finish();
    return c;
}

/// Merges `overrides` over the defaults and parses the result.
inline ScenarioConfig make_config(const json& overrides = json::object()) {
    if (!overrides.is_object()) throw config_error("config: top level must be an object");
    json doc = default_config_document();
    doc.merge_patch(overrides);
    return parse_config(doc);
}

inline json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(fmt::format("cannot read config '{}'", path));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(fmt::format("config '{}': {}", path, e.what()));
    }
}

inline ScenarioConfig load_config(const std::string& path) { return make_config(read_config_file(path)); }

/// Document hashed into report metadata: the effective config without the
/// output location, so the same scenario written elsewhere stays identical.
inline std::string canonical_config(const ScenarioConfig& c) {
    json doc = c.document;
    doc.erase("output_dir");
    return doc.dump();
}

}  // namespace wine
