#ifndef SHELFSIM_SCENE_HPP
#define SHELFSIM_SCENE_HPP

#include <optional>
#include <string>
#include <vector>

#include "shelfsim/geometry.hpp"

namespace shelfsim {

using BoxId = std::string;

// Shelf frame convention used everywhere: x right, y up, z from the open
// shelf front toward the back wall; origin at the front-bottom-left interior
// corner. The front plane z = 0 is open (boxes are pulled out through it).
struct Shelf {
    double width = 1.00;   // x, meters
    double height = 1.60;  // y
    double depth = 0.30;   // z
    double wall_thickness = 0.02;
    bool has_side_walls = true;

    void validate() const;

    bool operator==(const Shelf&) const = default;
};

// Oriented box. `yaw` is the rotation about the z (depth) axis, i.e. the
// in-plane tilt a front-facing camera sees. The dynamic engine tracks full
// 3D orientation internally; a Scene only describes the yaw-representable
// rest configuration.
struct RigidBox {
    BoxId id;
    Vec3 half_extents;        // x width, y height, z depth; meters
    Vec3 position;            // centroid, shelf frame
    double yaw = 0.0;         // radians about +z
    Vec3 linear_velocity;
    Vec3 angular_velocity;
    bool removed = false;

    // Mass is always derived from volume and the configured density, never
    // stored, so it cannot drift out of sync with the extents.
    double mass_for(double density) const {
        return density * 8.0 * half_extents.x * half_extents.y * half_extents.z;
    }

    Quat orientation() const { return Quat::yaw_z(yaw); }

    // All 8 corners in shelf frame.
    std::vector<Vec3> corners() const;

    // Convex footprint on the floor plane (x-z), CCW.
    Polygon2 footprint() const;

    double top_y() const;
    double bottom_y() const;
    double front_z() const;
    double back_z() const;

    bool operator==(const RigidBox&) const = default;
};

struct Scene {
    Shelf shelf;
    std::vector<RigidBox> boxes;

    const RigidBox* find(const BoxId& id) const;
    RigidBox* find(const BoxId& id);
    std::optional<std::size_t> index_of(const BoxId& id) const;

    // Throws InvalidScene on duplicate ids, out-of-shelf boxes, or
    // interpenetration beyond `slop`.
    void validate(double slop = 0.002) const;

    // Structural checks only (ids, extents, containment). Start states fed
    // to the engine may interpenetrate; settling resolves that.
    void validate_structure(double slop = 0.002) const;

    bool operator==(const Scene&) const = default;
};

// Corners of an arbitrary oriented box (position + quaternion), used by the
// physics engine for boxes that have tipped out of plane.
std::vector<Vec3> box_corners(const Vec3& center, const Quat& q, const Vec3& half);

// Projection helpers shared by the support oracle and the renderer.
Polygon2 project_xz(const std::vector<Vec3>& corners);  // floor footprint
Polygon2 project_xy(const std::vector<Vec3>& corners);  // front view

}  // namespace shelfsim

#endif
