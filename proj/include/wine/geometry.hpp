#pragma once

// Machine-room model: rack boxes, transceiver mount points, ceiling IRS grid,
// straight and reflected propagation paths, and cone-based beam collision
// tracking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "wine/channel.hpp"
#include "wine/error.hpp"

namespace wine::geometry {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend Vec3 operator*(Vec3 a, double s) { return s * a; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

struct Segment {
    Vec3 start;
    Vec3 end;
    double length() const { return distance(start, end); }
};

struct Box {
    Vec3 lo;
    Vec3 hi;
};

/// Slab test; the box is closed, so grazing contact counts as intersection.
inline bool intersects(const Segment& seg, const Box& box) {
    const std::array<double, 3> p{seg.start.x, seg.start.y, seg.start.z};
    const std::array<double, 3> d{seg.end.x - seg.start.x, seg.end.y - seg.start.y,
                                  seg.end.z - seg.start.z};
    const std::array<double, 3> lo{box.lo.x, box.lo.y, box.lo.z};
    const std::array<double, 3> hi{box.hi.x, box.hi.y, box.hi.z};
    double t0 = 0.0;
    double t1 = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-15) {
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
            continue;
        }
        double ta = (lo[i] - p[i]) / d[i];
        double tb = (hi[i] - p[i]) / d[i];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

struct ClosestApproach {
    double s = 0.0;  // parameter on the first segment, in [0, 1]
    double t = 0.0;  // parameter on the second segment, in [0, 1]
    double distance = 0.0;
};

/// Closest points between two segments (Ericson, Real-Time Collision
/// Detection, 5.1.9), robust to degenerate and parallel segments.
inline ClosestApproach closest_approach(const Segment& a, const Segment& b) {
    constexpr double eps = 1e-12;
    const Vec3 d1 = a.end - a.start;
    const Vec3 d2 = b.end - b.start;
    const Vec3 r = a.start - b.start;
    const double aa = dot(d1, d1);
    const double ee = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (aa <= eps && ee <= eps) {
        s = t = 0.0;
    } else if (aa <= eps) {
        s = 0.0;
        t = std::clamp(f / ee, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (ee <= eps) {
            t = 0.0;
            s = std::clamp(-c / aa, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = aa * ee - b * b;
            s = denom > eps * aa * ee ? std::clamp((b * f - c * ee) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / ee;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / aa, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / aa, 0.0, 1.0);
            }
        }
    }
    const Vec3 pa = a.start + s * d1;
    const Vec3 pb = b.start + t * d2;
    return {s, t, distance(pa, pb)};
}

// ---------------------------------------------------------------------------
// Room layout

struct MachineRoom {
    double length = 20.0;  // x extent
    double width = 20.0;   // y extent
    double height = 5.5;   // ceiling height h
};

struct RackGrid {
    int rows = 10;
    int cols = 10;
    double pitch = 2.0;  // centre-to-centre
    double footprint_x = 0.6;
    double footprint_y = 1.2;
    double rack_height = 2.0;
    // Height of the transceiver above the rack top; negative mounts it on the
    // rack face below the top.
    double mount_offset = 0.2;
};

struct IrsSpec {
    double extent_x = 18.0;
    double extent_y = 18.0;
    double spacing = 1.8;  // d_IRS
};

inline int panels_per_side(double extent, double spacing) {
    if (!(spacing > 0.0)) throw config_error("irs.spacing must be > 0");
    if (!(extent >= 0.0)) throw config_error("irs.extent must be >= 0");
    return static_cast<int>(std::floor(extent / spacing + 1e-9)) + 1;
}

struct Layout {
    MachineRoom room;
    RackGrid racks;
    IrsSpec irs;
    std::vector<Vec3> rack_centers;  // floor-level centre of each footprint
    std::vector<Box> rack_boxes;
    std::vector<Vec3> transceivers;
    std::vector<Vec3> panels;
    int panels_x = 0;
    int panels_y = 0;

    std::size_t rack_count() const { return rack_centers.size(); }
    std::size_t panel_count() const { return panels.size(); }
};

inline Layout generate_layout(const MachineRoom& room, const RackGrid& racks, const IrsSpec& irs) {
    if (!(room.length > 0.0 && room.width > 0.0 && room.height > 0.0))
        throw config_error("room: all dimensions must be > 0");
    if (racks.rows < 1 || racks.cols < 1) throw config_error("racks: rows and cols must be >= 1");
    if (!(racks.pitch > 0.0)) throw config_error("racks.pitch must be > 0");
    if (!(racks.footprint_x > 0.0 && racks.footprint_y > 0.0 && racks.rack_height > 0.0))
        throw config_error("racks: footprint and height must be > 0");
    if ((racks.cols > 1 && racks.pitch < racks.footprint_x) ||
        (racks.rows > 1 && racks.pitch < racks.footprint_y))
        throw geometry_error(fmt::format("racks.pitch {} is smaller than the rack footprint", racks.pitch));
    const double span_x = (racks.cols - 1) * racks.pitch + racks.footprint_x;
    const double span_y = (racks.rows - 1) * racks.pitch + racks.footprint_y;
    if (span_x > room.length + 1e-9)
        throw geometry_error(
            fmt::format("rack grid spans {:.3f} m along x but room.length is {:.3f} m", span_x, room.length));
    if (span_y > room.width + 1e-9)
        throw geometry_error(
            fmt::format("rack grid spans {:.3f} m along y but room.width is {:.3f} m", span_y, room.width));
    const double mount_z = racks.rack_height + racks.mount_offset;
    if (!(mount_z < room.height))
        throw geometry_error(fmt::format("transceiver height {:.3f} m must be below room.height {:.3f} m",
                                         mount_z, room.height));
    if (!(mount_z > 0.0)) throw geometry_error("transceiver mount point lies below the floor");
    if (irs.extent_x > room.length + 1e-9 || irs.extent_y > room.width + 1e-9)
        throw geometry_error(fmt::format("irs extent {:.3f} x {:.3f} m exceeds room footprint", irs.extent_x,
                                         irs.extent_y));

    Layout out;
    out.room = room;
    out.racks = racks;
    out.irs = irs;
    const double cx = room.length / 2.0;
    const double cy = room.width / 2.0;
    const std::size_t n = static_cast<std::size_t>(racks.rows) * static_cast<std::size_t>(racks.cols);
    out.rack_centers.reserve(n);
    out.rack_boxes.reserve(n);
    out.transceivers.reserve(n);
    for (int r = 0; r < racks.rows; ++r) {
        for (int c = 0; c < racks.cols; ++c) {
            const double x = cx + (c - (racks.cols - 1) / 2.0) * racks.pitch;
            const double y = cy + (r - (racks.rows - 1) / 2.0) * racks.pitch;
            out.rack_centers.push_back({x, y, 0.0});
            out.rack_boxes.push_back({{x - racks.footprint_x / 2, y - racks.footprint_y / 2, 0.0},
                                      {x + racks.footprint_x / 2, y + racks.footprint_y / 2, racks.rack_height}});
            out.transceivers.push_back({x, y, mount_z});
        }
    }

    out.panels_x = panels_per_side(irs.extent_x, irs.spacing);
    out.panels_y = panels_per_side(irs.extent_y, irs.spacing);
    const double px0 = cx - (out.panels_x - 1) * irs.spacing / 2.0;
    const double py0 = cy - (out.panels_y - 1) * irs.spacing / 2.0;
    out.panels.reserve(static_cast<std::size_t>(out.panels_x) * static_cast<std::size_t>(out.panels_y));
    for (int j = 0; j < out.panels_y; ++j)
        for (int i = 0; i < out.panels_x; ++i)
            out.panels.push_back({px0 + i * irs.spacing, py0 + j * irs.spacing, room.height});
    return out;
}

/// Smallest room (and IRS extent) holding `rack_count` racks on a near-square
/// grid, keeping pitch, rack dimensions and ceiling height from `base`.
/// The base room is kept when the grid already fits inside it.
inline Layout layout_for_racks(std::size_t rack_count, const MachineRoom& base_room, const RackGrid& base_racks,
                               const IrsSpec& base_irs, double margin = 1.0) {
    if (rack_count == 0) throw config_error("layout: need at least one rack");
    RackGrid racks = base_racks;
    racks.cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rack_count))));
    racks.rows = static_cast<int>((rack_count + racks.cols - 1) / racks.cols);
    MachineRoom room = base_room;
    const double need_x = (racks.cols - 1) * racks.pitch + racks.footprint_x + 2 * margin;
    const double need_y = (racks.rows - 1) * racks.pitch + racks.footprint_y + 2 * margin;
    room.length = std::max(room.length, need_x);
    room.width = std::max(room.width, need_y);
    IrsSpec irs = base_irs;
    irs.extent_x = std::max(irs.extent_x, room.length - 2 * margin);
    irs.extent_y = std::max(irs.extent_y, room.width - 2 * margin);
    return generate_layout(room, racks, irs);
}

/// Layout for a k-ary n-cube (n <= 3) in which rack i hosts torus vertex i.
/// Dimensions 0 and 1 run along grid columns and rows; the k slices of
/// dimension 2 are tiled as a near-square block arrangement, so lattice
/// neighbours in the first two dimensions are physical neighbours.
inline Layout layout_for_torus(int k, int n, const MachineRoom& base_room, const RackGrid& base_racks,
                               const IrsSpec& base_irs, double margin = 1.0) {
    if (k < 1 || n < 1 || n > 3) throw config_error(fmt::format("layout_for_torus: unsupported ({}, {})", k, n));
    int block_cols = 1;
    int block_rows = 1;
    if (n == 3) {
        for (int a = 1; a <= k; ++a)
            if (k % a == 0 && a * a <= k) block_rows = a;
        block_cols = k / block_rows;
    }
    const int cols = k * block_cols;
    const int rows = (n == 1 ? 1 : k) * block_rows;
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(k);

    RackGrid racks = base_racks;
    racks.cols = cols;
    racks.rows = rows;
    MachineRoom room = base_room;
    room.length = std::max(room.length, (cols - 1) * racks.pitch + racks.footprint_x + 2 * margin);
    room.width = std::max(room.width, (rows - 1) * racks.pitch + racks.footprint_y + 2 * margin);
    IrsSpec irs = base_irs;
    irs.extent_x = std::max(irs.extent_x, room.length - 2 * margin);
    irs.extent_y = std::max(irs.extent_y, room.width - 2 * margin);
    const Layout grid = generate_layout(room, racks, irs);

    Layout out = grid;
    out.rack_centers.clear();
    out.rack_boxes.clear();
    out.transceivers.clear();
    for (std::size_t v = 0; v < count; ++v) {
        const int x = static_cast<int>(v % k);
        const int y = n >= 2 ? static_cast<int>((v / k) % k) : 0;
        const int z = n >= 3 ? static_cast<int>(v / (static_cast<std::size_t>(k) * k)) : 0;
        const int col = x + k * (z % block_cols);
        const int row = y + k * (z / block_cols);
        const std::size_t slot = static_cast<std::size_t>(row) * cols + col;
        out.rack_centers.push_back(grid.rack_centers[slot]);
        out.rack_boxes.push_back(grid.rack_boxes[slot]);
        out.transceivers.push_back(grid.transceivers[slot]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Paths

enum class path_kind { s_wine, r_wine };

inline const char* to_string(path_kind k) { return k == path_kind::s_wine ? "s-WINE" : "r-WINE"; }

struct WirelessPath {
    path_kind kind = path_kind::s_wine;
    std::size_t src = 0;
    std::size_t dst = 0;
    std::vector<Segment> segments;
    double total_length = 0.0;
    std::optional<std::size_t> panel;
};

namespace detail {

inline void check_rack(const Layout& layout, std::size_t id, const char* what) {
    if (id >= layout.rack_count())
        throw domain_error(fmt::format("{}: rack id {} out of range (have {})", what, id, layout.rack_count()));
}

inline bool occluded(const Layout& layout, const Segment& seg, std::size_t src, std::size_t dst) {
    const double top = layout.racks.rack_height;
    if (seg.start.z > top && seg.end.z > top) return false;
    for (std::size_t i = 0; i < layout.rack_boxes.size(); ++i) {
        if (i == src || i == dst) continue;
        if (intersects(seg, layout.rack_boxes[i])) return true;
    }
    return false;
}

}  // namespace detail

/// Direct line-of-sight path; nullopt when another rack blocks it.
inline std::optional<WirelessPath> swine_path(const Layout& layout, std::size_t src, std::size_t dst) {
    detail::check_rack(layout, src, "swine_path");
    detail::check_rack(layout, dst, "swine_path");
    if (src == dst) throw domain_error("swine_path: source and destination must differ");
    Segment seg{layout.transceivers[src], layout.transceivers[dst]};
    if (detail::occluded(layout, seg, src, dst)) return std::nullopt;
    WirelessPath p;
    p.kind = path_kind::s_wine;
    p.src = src;
    p.dst = dst;
    p.total_length = seg.length();
    p.segments.push_back(seg);
    return p;
}

/// Path reflected once by ceiling panel `panel`; nullopt when either leg is blocked.
inline std::optional<WirelessPath> rwine_path(const Layout& layout, std::size_t src, std::size_t dst,
                                              std::size_t panel) {
    detail::check_rack(layout, src, "rwine_path");
    detail::check_rack(layout, dst, "rwine_path");
    if (panel >= layout.panel_count())
        throw domain_error(fmt::format("rwine_path: panel {} out of range (have {})", panel, layout.panel_count()));
    const Vec3 p = layout.panels[panel];
    Segment up{layout.transceivers[src], p};
    Segment down{p, layout.transceivers[dst]};
    if (detail::occluded(layout, up, src, dst) || detail::occluded(layout, down, src, dst)) return std::nullopt;
    WirelessPath w;
    w.kind = path_kind::r_wine;
    w.src = src;
    w.dst = dst;
    w.panel = panel;
    w.total_length = up.length() + down.length();
    w.segments = {up, down};
    return w;
}

// ---------------------------------------------------------------------------
// Beams

struct BeamCone {
    Vec3 apex;
    Vec3 axis;  // unit
    double half_angle = 0.0;
    double length = 0.0;

    /// Radius at `along` metres from the apex; the cone ends at its receiver.
    double radius_at(double along) const {
        return std::clamp(along, 0.0, length) * std::tan(half_angle);
    }
};

inline std::vector<BeamCone> beam_cones(const WirelessPath& path, double divergence_rad) {
    if (!(divergence_rad > 0.0)) throw domain_error("beam_cones: divergence must be positive");
    std::vector<BeamCone> out;
    out.reserve(path.segments.size());
    for (const auto& seg : path.segments) {
        const double len = seg.length();
        const Vec3 axis = len > 0.0 ? (1.0 / len) * (seg.end - seg.start) : Vec3{0, 0, 1};
        out.push_back({seg.start, axis, divergence_rad / 2.0, len});
    }
    return out;
}

struct TracedLink {
    WirelessPath path;
    double divergence_rad = 0.0;  // full cone angle
};

struct CollisionOptions {
    // Links that share a rack are served by the same multi-beam array and are
    // not checked against each other.
    bool exempt_shared_racks = true;
};

inline bool share_rack(const WirelessPath& a, const WirelessPath& b) {
    return a.src == b.src || a.src == b.dst || a.dst == b.src || a.dst == b.dst;
}

/// Two links conflict when some pair of their segments comes closer than the
/// sum of the local beam radii at the points of closest approach.
inline bool links_conflict(const TracedLink& a, const TracedLink& b, const CollisionOptions& opts = {}) {
    if (opts.exempt_shared_racks && share_rack(a.path, b.path)) return false;
    const double ta = std::tan(a.divergence_rad / 2.0);
    const double tb = std::tan(b.divergence_rad / 2.0);
    for (const auto& sa : a.path.segments) {
        const double la = sa.length();
        for (const auto& sb : b.path.segments) {
            const double lb = sb.length();
            const ClosestApproach ca = closest_approach(sa, sb);
            if (ca.distance < ca.s * la * ta + ca.t * lb * tb) return true;
        }
    }
    return false;
}

struct CollisionReport {
    std::vector<std::pair<std::size_t, std::size_t>> conflicts;  // i < j, lexicographic
    std::vector<bool> in_conflict;
    double proportion = 0.0;
};

namespace detail {

inline Box inflated_bounds(const TracedLink& link) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Box b{{inf, inf, inf}, {-inf, -inf, -inf}};
    double r = 0.0;
    for (const auto& s : link.path.segments) {
        for (const Vec3& p : {s.start, s.end}) {
            b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y), std::min(b.lo.z, p.z)};
            b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y), std::max(b.hi.z, p.z)};
        }
        r = std::max(r, s.length() * std::tan(link.divergence_rad / 2.0));
    }
    b.lo = b.lo - Vec3{r, r, r};
    b.hi = b.hi + Vec3{r, r, r};
    return b;
}

inline bool overlap(const Box& a, const Box& b) {
    return a.lo.x <= b.hi.x && b.lo.x <= a.hi.x && a.lo.y <= b.hi.y && b.lo.y <= a.hi.y && a.lo.z <= b.hi.z &&
           b.lo.z <= a.hi.z;
}

}  // namespace detail

inline CollisionReport detect_collisions(std::span<const TracedLink> links, const CollisionOptions& opts = {}) {
    CollisionReport rep;
    rep.in_conflict.assign(links.size(), false);
    std::vector<Box> bounds;
    bounds.reserve(links.size());
    for (const auto& l : links) bounds.push_back(detail::inflated_bounds(l));
    for (std::size_t i = 0; i < links.size(); ++i) {
        for (std::size_t j = i + 1; j < links.size(); ++j) {
            if (!detail::overlap(bounds[i], bounds[j])) continue;
            if (links_conflict(links[i], links[j], opts)) {
                rep.conflicts.emplace_back(i, j);
                rep.in_conflict[i] = rep.in_conflict[j] = true;
            }
        }
    }
    if (!links.empty()) {
        const auto hit = std::count(rep.in_conflict.begin(), rep.in_conflict.end(), true);
        rep.proportion = static_cast<double>(hit) / static_cast<double>(links.size());
    }
    return rep;
}

struct PanelCandidate {
    std::size_t panel = 0;
    double capacity_bps = 0.0;
    WirelessPath path;
};

/// Unblocked panels for (src, dst), best end-to-end capacity first; ties go to
/// the lower panel index.
inline std::vector<PanelCandidate> panel_candidates(const Layout& layout, std::size_t src, std::size_t dst,
                                                    const channel::LinkSpec& spec) {
    std::vector<PanelCandidate> out;
    out.reserve(layout.panel_count());
    for (std::size_t p = 0; p < layout.panel_count(); ++p) {
        auto path = rwine_path(layout, src, dst, p);
        if (!path) continue;
        const double cap = channel::link_budget(spec, path->total_length).capacity_bps;
        out.push_back({p, cap, std::move(*path)});
    }
    std::stable_sort(out.begin(), out.end(), [](const PanelCandidate& a, const PanelCandidate& b) {
        if (a.capacity_bps != b.capacity_bps) return a.capacity_bps > b.capacity_bps;
        return a.panel < b.panel;
    });
    return out;
}

}  // namespace wine::geometry
