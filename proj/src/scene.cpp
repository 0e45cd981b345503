#include "shelfsim/scene.hpp"

#include <set>

#include "shelfsim/contact.hpp"
#include "shelfsim/errors.hpp"

namespace shelfsim {

void Shelf::validate() const {
    if (width <= 0 || height <= 0 || depth <= 0 || wall_thickness <= 0)
        throw InvalidScene("shelf dimensions must be positive");
}

std::vector<Vec3> box_corners(const Vec3& center, const Quat& q, const Vec3& half) {
    std::vector<Vec3> out;
    out.reserve(8);
    for (int i = 0; i < 8; ++i) {
        Vec3 local{(i & 1) ? half.x : -half.x,
                   (i & 2) ? half.y : -half.y,
                   (i & 4) ? half.z : -half.z};
        out.push_back(center + q.rotate(local));
    }
    return out;
}

Polygon2 project_xz(const std::vector<Vec3>& corners) {
    std::vector<Vec2> pts;
    pts.reserve(corners.size());
    for (const Vec3& c : corners) pts.push_back({c.x, c.z});
    return convex_hull(std::move(pts));
}

Polygon2 project_xy(const std::vector<Vec3>& corners) {
    std::vector<Vec2> pts;
    pts.reserve(corners.size());
    for (const Vec3& c : corners) pts.push_back({c.x, c.y});
    return convex_hull(std::move(pts));
}

std::vector<Vec3> RigidBox::corners() const {
    return box_corners(position, orientation(), half_extents);
}

Polygon2 RigidBox::footprint() const { return project_xz(corners()); }

double RigidBox::top_y() const {
    double c = std::fabs(std::cos(yaw)), s = std::fabs(std::sin(yaw));
    return position.y + half_extents.y * c + half_extents.x * s;
}

double RigidBox::bottom_y() const {
    double c = std::fabs(std::cos(yaw)), s = std::fabs(std::sin(yaw));
    return position.y - half_extents.y * c - half_extents.x * s;
}

double RigidBox::front_z() const { return position.z - half_extents.z; }
double RigidBox::back_z() const { return position.z + half_extents.z; }

const RigidBox* Scene::find(const BoxId& id) const {
    for (const RigidBox& b : boxes)
        if (b.id == id) return &b;
    return nullptr;
}

RigidBox* Scene::find(const BoxId& id) {
    for (RigidBox& b : boxes)
        if (b.id == id) return &b;
    return nullptr;
}

std::optional<std::size_t> Scene::index_of(const BoxId& id) const {
    for (std::size_t i = 0; i < boxes.size(); ++i)
        if (boxes[i].id == id) return i;
    return std::nullopt;
}

void Scene::validate(double slop) const {
    validate_structure(slop);

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (boxes[i].removed) continue;
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (boxes[j].removed) continue;
            auto m = obb_contact(boxes[i], boxes[j], slop);
            if (!m) continue;
            for (const ContactPoint& p : m->points) {
                if (p.penetration > 2.0 * slop)
                    throw InvalidScene("boxes " + boxes[i].id + " and " + boxes[j].id +
                                       " interpenetrate beyond slop");
            }
        }
    }
}

void Scene::validate_structure(double slop) const {
    shelf.validate();

    std::set<BoxId> ids;
    for (const RigidBox& b : boxes) {
        if (!ids.insert(b.id).second)
            throw InvalidScene("duplicate box id: " + b.id);
        if (b.half_extents.x <= 0 || b.half_extents.y <= 0 || b.half_extents.z <= 0)
            throw InvalidScene("non-positive half extents on box " + b.id);
        if (2 * b.half_extents.x > shelf.width || 2 * b.half_extents.y > shelf.height ||
            2 * b.half_extents.z > shelf.depth)
            throw InvalidScene("box " + b.id + " larger than the shelf interior");
        if (b.removed) continue;
        // containment within the interior volume, slop tolerance
        for (const Vec3& c : b.corners()) {
            if (c.x < -slop || c.x > shelf.width + slop || c.y < -slop ||
                c.y > shelf.height + slop || c.z < -slop || c.z > shelf.depth + slop)
                throw InvalidScene("box " + b.id + " outside the shelf interior");
        }
    }
}

}  // namespace shelfsim
