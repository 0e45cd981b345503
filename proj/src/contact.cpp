#include "shelfsim/contact.hpp"

#include <algorithm>
#include <cmath>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

constexpr double kParallelEps = 1e-10;
// Absolute bias toward face axes when an edge axis is only marginally better;
// face manifolds give 4-point support instead of a single rocking point.
constexpr double kFaceBias = 1e-4;

struct SatResult {
    bool overlap = false;
    double separation = 0.0;  // most positive separation (negative = penetrating)
    int axis_index = -1;      // 0..5 face axes (0..2 of A, 3..5 of B), 6..14 edge axes
    Vec3 axis;                // oriented from a toward b
};

Vec3 axis_of(const Mat3& rot, int i) { return rot.col(i); }

double project_radius(const Mat3& rot, const Vec3& half, const Vec3& axis) {
    return half.x * std::fabs(dot(axis_of(rot, 0), axis)) +
           half.y * std::fabs(dot(axis_of(rot, 1), axis)) +
           half.z * std::fabs(dot(axis_of(rot, 2), axis));
}

// Clip a polygon against the half-space dot(n, p) <= d.
void clip_halfspace(std::vector<Vec3>& poly, const Vec3& n, double d) {
    std::vector<Vec3> out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec3& cur = poly[i];
        const Vec3& nxt = poly[(i + 1) % poly.size()];
        double dc = dot(n, cur) - d;
        double dn = dot(n, nxt) - d;
        if (dc <= 0.0) {
            out.push_back(cur);
            if (dn > 0.0) out.push_back(cur + (nxt - cur) * (dc / (dc - dn)));
        } else if (dn <= 0.0) {
            out.push_back(cur + (nxt - cur) * (dc / (dc - dn)));
        }
    }
    poly = std::move(out);
}

std::vector<ContactPoint> reduce_manifold(std::vector<ContactPoint> pts, const Vec3& normal) {
    if (pts.size() <= 4) return pts;

    auto deepest = std::max_element(pts.begin(), pts.end(),
                                    [](const ContactPoint& a, const ContactPoint& b) {
                                        return a.penetration < b.penetration;
                                    });
    std::size_t i0 = static_cast<std::size_t>(deepest - pts.begin());

    std::size_t i1 = i0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d = length_sq(pts[i].position - pts[i0].position);
        if (d > best_d) { best_d = d; i1 = i; }
    }

    std::size_t i2 = i0, i3 = i0;
    double best_pos = 0.0, best_neg = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double s = dot(normal, cross(pts[i1].position - pts[i0].position,
                                     pts[i].position - pts[i0].position));
        if (s > best_pos) { best_pos = s; i2 = i; }
        if (s < best_neg) { best_neg = s; i3 = i; }
    }

    std::vector<std::size_t> keep{i0};
    for (std::size_t idx : {i1, i2, i3})
        if (std::find(keep.begin(), keep.end(), idx) == keep.end()) keep.push_back(idx);
    std::sort(keep.begin(), keep.end());

    std::vector<ContactPoint> out;
    out.reserve(keep.size());
    for (std::size_t idx : keep) out.push_back(pts[idx]);
    return out;
}

// Closest points between segments p1+s*d1 (s in [0,1]) and p2+t*d2.
void closest_on_segments(const Vec3& p1, const Vec3& d1, const Vec3& p2, const Vec3& d2,
                         Vec3& c1, Vec3& c2) {
    Vec3 r = p1 - p2;
    double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double c = dot(d1, r), b = dot(d1, d2);
    double denom = a * e - b * b;
    double s = 0.0;
    if (std::fabs(denom) > kParallelEps) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
    double t = (b * s + f) / e;
    if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    c1 = p1 + d1 * s;
    c2 = p2 + d2 * t;
}

}  // namespace

std::optional<ContactManifold> obb_contact_poses(const ObbPose& a, const ObbPose& b,
                                                 double slop,
                                                 const BoxId& id_a, const BoxId& id_b) {
    const Mat3 ra = a.orientation.to_mat3();
    const Mat3 rb = b.orientation.to_mat3();
    const Vec3 t = b.center - a.center;

    SatResult best_face, best_edge;
    best_face.separation = -1e30;
    best_edge.separation = -1e30;

    auto test_axis = [&](Vec3 axis, int index) -> bool {
        double len = length(axis);
        if (len < kParallelEps) return true;  // degenerate cross product, skip
        axis = axis / len;
        double dist = dot(t, axis);
        if (dist < 0.0) {
            axis = -axis;
            dist = -dist;
        }
        double sep = dist - (project_radius(ra, a.half, axis) + project_radius(rb, b.half, axis));
        if (sep > slop) return false;  // separating axis found
        SatResult& slot = index < 6 ? best_face : best_edge;
        if (sep > slot.separation) {
            slot.overlap = true;
            slot.separation = sep;
            slot.axis_index = index;
            slot.axis = axis;
        }
        return true;
    };

    for (int i = 0; i < 3; ++i)
        if (!test_axis(axis_of(ra, i), i)) return std::nullopt;
    for (int i = 0; i < 3; ++i)
        if (!test_axis(axis_of(rb, i), 3 + i)) return std::nullopt;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!test_axis(cross(axis_of(ra, i), axis_of(rb, j)), 6 + 3 * i + j))
                return std::nullopt;

    if (!best_face.overlap && !best_edge.overlap) return std::nullopt;

    ContactManifold manifold;
    manifold.box_a = id_a;
    manifold.box_b = id_b;

    const bool use_edge =
        best_edge.overlap && (!best_face.overlap ||
                              best_edge.separation > best_face.separation + kFaceBias);

    if (use_edge) {
        // Single-point manifold from the closest points of the two support edges.
        const Vec3 n = best_edge.axis;  // from a toward b
        int ei = (best_edge.axis_index - 6) / 3;
        int ej = (best_edge.axis_index - 6) % 3;

        Vec3 mid_a = a.center;
        for (int k = 0; k < 3; ++k) {
            if (k == ei) continue;
            Vec3 ax = axis_of(ra, k);
            double sign = dot(ax, n) >= 0.0 ? 1.0 : -1.0;
            mid_a += ax * (sign * a.half[k]);
        }
        Vec3 dir_a = axis_of(ra, ei) * (2.0 * a.half[ei]);
        Vec3 start_a = mid_a - dir_a * 0.5;

        Vec3 mid_b = b.center;
        for (int k = 0; k < 3; ++k) {
            if (k == ej) continue;
            Vec3 ax = axis_of(rb, k);
            double sign = dot(ax, n) >= 0.0 ? -1.0 : 1.0;
            mid_b += ax * (sign * b.half[k]);
        }
        Vec3 dir_b = axis_of(rb, ej) * (2.0 * b.half[ej]);
        Vec3 start_b = mid_b - dir_b * 0.5;

        Vec3 ca, cb;
        closest_on_segments(start_a, dir_a, start_b, dir_b, ca, cb);
        manifold.normal = n;
        manifold.points.push_back({(ca + cb) * 0.5, std::max(0.0, -best_edge.separation)});
        return manifold;
    }

    // Face manifold: clip the incident face of the other box against the
    // side planes of the reference face.
    const bool ref_is_a = best_face.axis_index < 3;
    const ObbPose& ref = ref_is_a ? a : b;
    const ObbPose& inc = ref_is_a ? b : a;
    const Mat3& ref_rot = ref_is_a ? ra : rb;
    const Mat3& inc_rot = ref_is_a ? rb : ra;

    // Reference face normal pointing from ref toward inc.
    Vec3 n_ref = best_face.axis * (ref_is_a ? 1.0 : -1.0);

    // Incident face: the face of inc most anti-parallel to n_ref.
    int inc_axis = 0;
    double inc_sign = 1.0, most_anti = 1e30;
    for (int k = 0; k < 3; ++k) {
        double d = dot(axis_of(inc_rot, k), n_ref);
        if (d < most_anti) { most_anti = d; inc_axis = k; inc_sign = 1.0; }
        if (-d < most_anti) { most_anti = -d; inc_axis = k; inc_sign = -1.0; }
    }

    Vec3 inc_n = axis_of(inc_rot, inc_axis) * inc_sign;
    Vec3 inc_center = inc.center + inc_n * inc.half[inc_axis];
    int u_axis = (inc_axis + 1) % 3, v_axis = (inc_axis + 2) % 3;
    Vec3 u = axis_of(inc_rot, u_axis) * inc.half[u_axis];
    Vec3 v = axis_of(inc_rot, v_axis) * inc.half[v_axis];
    std::vector<Vec3> poly{inc_center - u - v, inc_center + u - v,
                           inc_center + u + v, inc_center - u + v};

    int ref_axis = best_face.axis_index % 3;
    for (int k = 0; k < 3; ++k) {
        if (k == ref_axis) continue;
        Vec3 side = axis_of(ref_rot, k);
        clip_halfspace(poly, side, dot(side, ref.center) + ref.half[k]);
        if (poly.empty()) break;
        clip_halfspace(poly, -side, -dot(side, ref.center) + ref.half[k]);
        if (poly.empty()) break;
    }

    double face_d = dot(n_ref, ref.center) + ref.half[ref_axis] *
                        std::fabs(dot(n_ref, axis_of(ref_rot, ref_axis)));

    std::vector<ContactPoint> pts;
    for (const Vec3& p : poly) {
        double s = dot(n_ref, p) - face_d;  // gap above the reference face
        if (s <= slop) pts.push_back({p, std::max(0.0, -s)});
    }
    if (pts.empty()) {
        // Shallow corner graze: keep the least-separated incident corner.
        double best_s = 1e30;
        Vec3 best_p;
        for (const Vec3& p : poly.empty() ? std::vector<Vec3>{inc_center - u - v,
                                                              inc_center + u - v,
                                                              inc_center + u + v,
                                                              inc_center - u + v}
                                          : poly) {
            double s = dot(n_ref, p) - face_d;
            if (s < best_s) { best_s = s; best_p = p; }
        }
        if (best_s > slop) return std::nullopt;
        pts.push_back({best_p, std::max(0.0, -best_s)});
    }

    manifold.normal = ref_is_a ? n_ref : -n_ref;  // a -> b
    manifold.points = reduce_manifold(std::move(pts), manifold.normal);
    return manifold;
}

std::optional<ContactManifold> obb_contact(const RigidBox& a, const RigidBox& b, double slop) {
    constexpr double kMinExtent = 1e-6;
    for (const RigidBox* box : {&a, &b}) {
        if (box->half_extents.x < kMinExtent || box->half_extents.y < kMinExtent ||
            box->half_extents.z < kMinExtent)
            throw DegenerateGeometry("degenerate box " + box->id);
    }
    if (a.removed || b.removed) return std::nullopt;
    return obb_contact_poses({a.position, a.orientation(), a.half_extents},
                             {b.position, b.orientation(), b.half_extents}, slop, a.id, b.id);
}

}  // namespace shelfsim
