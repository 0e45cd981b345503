#ifndef SHELFSIM_CONTACT_HPP
#define SHELFSIM_CONTACT_HPP

#include <optional>
#include <string>
#include <vector>

#include "shelfsim/geometry.hpp"
#include "shelfsim/scene.hpp"

namespace shelfsim {

struct ContactPoint {
    Vec3 position;      // world space, meters
    double penetration; // >= 0; touching-within-slop contacts report 0
};

struct ContactManifold {
    BoxId box_a;
    BoxId box_b;
    Vec3 normal;  // unit, pointing from a to b
    std::vector<ContactPoint> points;  // 1..4
};

// Pose + extents view of a collider, decoupled from RigidBox so the physics
// engine can feed full 3D orientations through the same code path.
struct ObbPose {
    Vec3 center;
    Quat orientation;
    Vec3 half;
};

// Separating-axis test over the 15 candidate axes, extended by `slop`:
// a manifold is produced iff no axis separates the boxes by more than slop.
// Contact points come from clipping the incident face against the reference
// face (edge-edge cases produce a single point). Normal points from a to b.
std::optional<ContactManifold> obb_contact_poses(const ObbPose& a, const ObbPose& b,
                                                 double slop,
                                                 const BoxId& id_a = "a",
                                                 const BoxId& id_b = "b");

// Spec-level operation on scene boxes. Throws DegenerateGeometry when any
// half-extent is below 1e-6 m; neither box may be removed.
std::optional<ContactManifold> obb_contact(const RigidBox& a, const RigidBox& b, double slop);

}  // namespace shelfsim

#endif
