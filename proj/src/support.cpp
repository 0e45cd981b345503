#include "shelfsim/support.hpp"

#include <algorithm>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

struct BoxGeom {
    const RigidBox* box;
    Polygon2 footprint;
    double top;
    double bottom;
};

std::vector<BoxGeom> collect_geometry(const Scene& scene) {
    std::vector<BoxGeom> out;
    out.reserve(scene.boxes.size());
    for (const RigidBox& b : scene.boxes) {
        if (b.removed) continue;
        out.push_back({&b, b.footprint(), b.top_y(), b.bottom_y()});
    }
    return out;
}

bool floor_supports(const BoxGeom& g, double slop) {
    return g.bottom < slop && g.bottom > -4.0 * slop;
}

bool box_supports(const BoxGeom& under, const BoxGeom& over, double slop, double& area) {
    double gap = over.bottom - under.top;
    if (gap >= slop || gap <= -4.0 * slop) return false;
    area = overlap_area(under.footprint, over.footprint);
    return area > 1e-10;
}

// Convex hull of the union of a box's per-supporter overlap polygons.
Polygon2 combined_support_hull(const BoxGeom& g, const std::vector<const BoxGeom*>& supporters,
                               bool on_floor, double /*slop*/) {
    std::vector<Vec2> verts;
    if (on_floor) {
        // resting on the floor: the box's whole footprint carries it
        verts.insert(verts.end(), g.footprint.begin(), g.footprint.end());
    }
    for (const BoxGeom* u : supporters) {
        Polygon2 overlap = clip_convex(g.footprint, u->footprint);
        verts.insert(verts.end(), overlap.begin(), overlap.end());
    }
    return convex_hull(std::move(verts));
}

Vec2 centroid_xz(const RigidBox& b) { return {b.position.x, b.position.z}; }

}  // namespace

std::vector<const SupportEdge*> SupportGraph::edges_into(const BoxId& supported) const {
    std::vector<const SupportEdge*> out;
    for (const SupportEdge& e : edges)
        if (e.supported == supported) out.push_back(&e);
    return out;
}

std::vector<const SupportEdge*> SupportGraph::edges_from(const BoxId& supporter) const {
    std::vector<const SupportEdge*> out;
    for (const SupportEdge& e : edges)
        if (e.supporter == supporter) out.push_back(&e);
    return out;
}

bool SupportGraph::has_edge(const BoxId& supporter, const BoxId& supported) const {
    return std::any_of(edges.begin(), edges.end(), [&](const SupportEdge& e) {
        return e.supporter == supporter && e.supported == supported;
    });
}

SupportGraph build_support_graph(const Scene& scene, const SupportOptions& opts) {
    scene.validate(opts.slop);
    const auto geoms = collect_geometry(scene);

    SupportGraph graph;
    for (const BoxGeom& over : geoms) {
        std::vector<const BoxGeom*> supporters;
        bool on_floor = floor_supports(over, opts.slop);
        std::vector<SupportEdge> pending;

        if (on_floor)
            pending.push_back({kFloorId, over.box->id, polygon_area(over.footprint), false});

        for (const BoxGeom& under : geoms) {
            if (under.box == over.box) continue;
            double area = 0.0;
            if (box_supports(under, over, opts.slop, area)) {
                supporters.push_back(&under);
                pending.push_back({under.box->id, over.box->id, area, false});
            }
        }

        Polygon2 hull = combined_support_hull(over, supporters, on_floor, opts.slop);
        bool inside = point_in_convex(hull, centroid_xz(*over.box), opts.hull_margin);
        for (SupportEdge& e : pending) e.centroid_inside_hull = inside;
        graph.edges.insert(graph.edges.end(), pending.begin(), pending.end());
    }
    return graph;
}

std::set<BoxId> static_collapse_oracle(const Scene& scene, const BoxId& removed,
                                       const SupportOptions& opts) {
    if (!scene.find(removed)) throw UnknownBox(removed);

    auto geoms = collect_geometry(scene);
    std::set<BoxId> gone{removed};
    std::set<BoxId> collapsed;

    bool changed = true;
    while (changed) {
        changed = false;
        for (const BoxGeom& g : geoms) {
            const BoxId& id = g.box->id;
            if (gone.count(id)) continue;

            bool on_floor = floor_supports(g, opts.slop);
            std::vector<const BoxGeom*> supporters;
            for (const BoxGeom& under : geoms) {
                if (under.box == g.box || gone.count(under.box->id)) continue;
                double area = 0.0;
                if (box_supports(under, g, opts.slop, area)) supporters.push_back(&under);
            }

            Polygon2 hull = combined_support_hull(g, supporters, on_floor, opts.slop);
            if (!point_in_convex(hull, centroid_xz(*g.box), opts.hull_margin)) {
                collapsed.insert(id);
                gone.insert(id);
                changed = true;
            }
        }
    }
    return collapsed;
}

}  // namespace shelfsim
