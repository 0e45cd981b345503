#ifndef SHELFSIM_SUPPORT_HPP
#define SHELFSIM_SUPPORT_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "shelfsim/scene.hpp"

namespace shelfsim {

// Distinguished supporter node for the shelf floor.
inline const BoxId kFloorId = "#floor";

struct SupportEdge {
    BoxId supporter;       // kFloorId or a box id
    BoxId supported;
    double overlap_area;   // horizontal footprint intersection, m^2
    // Whether the supported box's centroid projects inside the convex hull of
    // its combined support footprint (shared by all edges into that box).
    bool centroid_inside_hull;
};

struct SupportGraph {
    std::vector<SupportEdge> edges;

    std::vector<const SupportEdge*> edges_into(const BoxId& supported) const;
    std::vector<const SupportEdge*> edges_from(const BoxId& supporter) const;
    bool has_edge(const BoxId& supporter, const BoxId& supported) const;
};

struct SupportOptions {
    double slop = 0.002;           // vertical gap tolerance for a support contact
    double hull_margin = 0.005;    // inward margin for the centroid-in-hull test
};

// Quasi-static support relation: edge u -> v iff the top face of u is within
// slop below the bottom face of v and their floor footprints overlap with
// positive area. Purely geometric; yawed boxes use their projected hulls.
SupportGraph build_support_graph(const Scene& scene, const SupportOptions& opts = {});

// Transitive set of boxes left without stable support once `removed` (and,
// iteratively, every box already in the result) is deleted. A box is stable
// when its centroid projection lies at least hull_margin inside the convex
// hull of its remaining support footprints. Deterministic, no dynamics.
std::set<BoxId> static_collapse_oracle(const Scene& scene, const BoxId& removed,
                                       const SupportOptions& opts = {});

}  // namespace shelfsim

#endif
