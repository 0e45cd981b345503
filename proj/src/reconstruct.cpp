#include "shelfsim/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

// Image rectangles that merely touch (stacked or adjacent boxes) are not
// conflicts; genuine occlusion overlaps are orders of magnitude larger.
constexpr double kOverlapAreaEps = 1e-3;  // m^2
constexpr int kMaxSampleRetries = 8;
// A box observed resting on another keeps its sampled centroid inside the
// middle (1 - 2*margin) of the supporter's depth span; draws outside that
// contradict the observed standing stack.
constexpr double kStackMarginFraction = 0.15;
constexpr double kStackAdjacencyTol = 0.01;  // m, vertical rect adjacency
// The observed stack is standing, so a box's depth cannot be implausibly
// slender for the tower it carries: extent >= fraction * (stack top above
// it - its own bottom).
constexpr double kSlendernessFraction = 0.12;

}  // namespace

void ObservationSet::validate() const {
    shelf.validate();
    std::set<BoxId> ids;
    for (const BoxObservation& b : boxes) {
        if (!ids.insert(b.id).second) throw InvalidInput("duplicate observation id: " + b.id);
        if (b.metric) {
            if (b.rect_size_m.x <= 0 || b.rect_size_m.y <= 0)
                throw InvalidInput("non-positive metric rect size on " + b.id);
            if (b.front_z < 0) throw InvalidInput("negative front_z on " + b.id);
        } else {
            if (!camera) throw InvalidInput("pixel observation " + b.id + " without a camera");
            if (b.rect_size_px.x <= 0 || b.rect_size_px.y <= 0)
                throw InvalidInput("non-positive pixel rect size on " + b.id);
            if (b.centroid_depth <= 0) throw InvalidInput("non-positive depth on " + b.id);
        }
    }
    if (camera && (camera->fx <= 0 || camera->fy <= 0))
        throw InvalidInput("camera focal lengths must be positive");
}

bool ObservationSet::has(const BoxId& id) const {
    return std::any_of(boxes.begin(), boxes.end(),
                       [&](const BoxObservation& b) { return b.id == id; });
}

FrontRect pixel_to_metric(const BoxObservation& obs, const Camera& camera) {
    if (obs.centroid_depth <= 0) throw InvalidInput("non-positive depth on " + obs.id);
    const double z = obs.centroid_depth;
    FrontRect r;
    r.size = {obs.rect_size_px.x * z / camera.fx, obs.rect_size_px.y * z / camera.fy};
    // pinhole back-projection; image y grows downward, shelf y grows upward
    r.center = {(obs.rect_center_px.x - camera.cx) * z / camera.fx,
                (camera.cy - obs.rect_center_px.y) * z / camera.fy};
    r.yaw = obs.rect_angle;
    return r;
}

std::vector<MetricFace> metric_faces(const ObservationSet& obs) {
    obs.validate();
    std::vector<MetricFace> out;
    out.reserve(obs.boxes.size());
    for (const BoxObservation& b : obs.boxes) {
        MetricFace f;
        f.id = b.id;
        f.yaw = b.rect_angle;
        if (b.metric) {
            f.center = b.rect_center_m;
            f.size = b.rect_size_m;
            f.front_z = b.front_z;
        } else {
            FrontRect r = pixel_to_metric(b, *obs.camera);
            // principal axis centered on the shelf opening
            f.center = {obs.shelf.width / 2 + r.center.x, obs.shelf.height / 2 + r.center.y};
            f.size = r.size;
            f.yaw = r.yaw;
            f.front_z = std::max(0.0, b.centroid_depth - obs.camera->shelf_distance);
        }
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

Polygon2 face_polygon(const MetricFace& f) {
    return rect_corners({f.center, f.size, f.yaw});
}

struct FaceBounds {
    double min_x, max_x, min_y, max_y;
};

FaceBounds face_bounds(const MetricFace& f) {
    Polygon2 poly = face_polygon(f);
    FaceBounds b{1e30, -1e30, 1e30, -1e30};
    for (const Vec2& p : poly) {
        b.min_x = std::min(b.min_x, p.x);
        b.max_x = std::max(b.max_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

// Observed stacking relation: v's bottom edge sits on u's top edge with real
// horizontal overlap. Purely image-derived.
bool stacked_on(const FaceBounds& v, const FaceBounds& u) {
    if (std::fabs(v.min_y - u.max_y) > kStackAdjacencyTol) return false;
    double overlap = std::min(v.max_x, u.max_x) - std::max(v.min_x, u.min_x);
    return overlap > 0.25 * std::min(v.max_x - v.min_x, u.max_x - u.min_x);
}

}  // namespace

SceneSample sample_scene(const ObservationSet& obs, const SimConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto faces = metric_faces(obs);
    const double slop = cfg.contact_slop;

    // deepest sampleable extent per box; boxes that cannot fit at all are a
    // data problem, not a sampling problem
    std::vector<double> depth_max(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
        depth_max[i] = obs.shelf.depth - faces[i].front_z;
        if (depth_max[i] < cfg.depth_min)
            throw UnsatisfiableObservation("box " + faces[i].id +
                                           " leaves no room for a plausible depth");
    }

    // pairs whose image rectangles genuinely overlap, front box first
    std::vector<Polygon2> polys(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) polys[i] = face_polygon(faces[i]);
    struct Conflict {
        std::size_t front, back;
        double bound;  // largest depth extent the front box may take
    };
    std::vector<Conflict> conflicts;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        for (std::size_t j = i + 1; j < faces.size(); ++j) {
            if (overlap_area(polys[i], polys[j]) <= kOverlapAreaEps) continue;
            std::size_t front = faces[i].front_z <= faces[j].front_z ? i : j;
            std::size_t back = front == i ? j : i;
            double bound = faces[back].front_z - faces[front].front_z + 0.5 * slop;
            if (bound < cfg.depth_min)
                throw UnsatisfiableObservation("boxes " + faces[front].id + " and " +
                                               faces[back].id +
                                               " overlap with no depth slack to resolve");
            conflicts.push_back({front, back, bound});
        }
    }

    // Observed support relations constrain the draws: a stacked box's
    // centroid must stay inside its supporter's sampled depth span.
    std::vector<FaceBounds> bounds(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) bounds[i] = face_bounds(faces[i]);
    std::vector<std::vector<std::size_t>> supporters(faces.size());
    for (std::size_t v = 0; v < faces.size(); ++v)
        for (std::size_t u = 0; u < faces.size(); ++u)
            if (u != v && stacked_on(bounds[v], bounds[u])) supporters[v].push_back(u);

    // stack-top height carried by each box, following the observed relations
    std::vector<double> stack_top(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) stack_top[i] = bounds[i].max_y;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < faces.size(); ++v)
            for (std::size_t u : supporters[v])
                if (stack_top[v] > stack_top[u] + 1e-12) {
                    stack_top[u] = stack_top[v];
                    changed = true;
                }
    }

    // bottom-up draw order so supporter extents are fixed before dependents
    std::vector<std::size_t> order(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return bounds[a].min_y < bounds[b].min_y;
    });

    SceneSample sample;
    sample.sample_seed = seed;
    for (int attempt = 0; attempt < kMaxSampleRetries; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        std::vector<double> extent(faces.size(), 0.0);
        for (std::size_t idx : order) {
            double lo = cfg.depth_min;
            double hi = depth_max[idx];
            lo = std::max(lo, kSlendernessFraction * (stack_top[idx] - bounds[idx].min_y));
            for (std::size_t u : supporters[idx]) {
                double margin = kStackMarginFraction * extent[u];
                double center_lo = faces[u].front_z + margin;
                double center_hi = faces[u].front_z + extent[u] - margin;
                lo = std::max(lo, 2.0 * (center_lo - faces[idx].front_z));
                hi = std::min(hi, 2.0 * (center_hi - faces[idx].front_z));
            }
            if (lo > hi) lo = std::max(cfg.depth_min, std::min(lo, hi));
            if (lo > hi) {  // contradictory observation; fall back to the shelf bound
                lo = cfg.depth_min;
                hi = depth_max[idx];
            }
            extent[idx] = rng.uniform(lo, hi);
        }
        for (const Conflict& c : conflicts) extent[c.front] = std::min(extent[c.front], c.bound);

        bool ok = true;
        for (std::size_t i = 0; i < faces.size(); ++i)
            if (extent[i] < cfg.depth_min) ok = false;
        if (!ok) continue;

        Scene scene;
        scene.shelf = obs.shelf;
        for (std::size_t i = 0; i < faces.size(); ++i) {
            const MetricFace& f = faces[i];
            RigidBox box;
            box.id = f.id;
            box.half_extents = {f.size.x / 2, f.size.y / 2, extent[i] / 2};
            box.position = {f.center.x, f.center.y, f.front_z + extent[i] / 2};
            box.yaw = f.yaw;
            scene.boxes.push_back(std::move(box));
            sample.depth_assignment[f.id] = extent[i];
        }
        scene.validate(slop);
        sample.scene = std::move(scene);
        return sample;
    }
    throw UnsatisfiableObservation("depth sampling retries exhausted");
}

std::vector<SceneSample> sample_batch(const ObservationSet& obs, const SimConfig& cfg,
                                      std::uint64_t base_seed, int k) {
    if (k < 1) throw InvalidInput("sample count must be at least 1");
    std::vector<SceneSample> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        try {
            out.push_back(sample_scene(obs, cfg, derive_seed(base_seed, static_cast<std::uint64_t>(i))));
        } catch (const UnsatisfiableObservation& e) {
            throw UnsatisfiableObservation(std::string(e.what()), i);
        }
    }
    return out;
}

ObservationSet observe_scene(const Scene& scene) {
    scene.validate_structure();
    ObservationSet obs;
    obs.shelf = scene.shelf;
    for (const RigidBox& box : scene.boxes) {
        if (box.removed) continue;
        auto corners = box.corners();
        std::vector<Vec2> pts;
        pts.reserve(corners.size());
        double front = 1e30;
        for (const Vec3& c : corners) {
            pts.push_back({c.x, c.y});
            front = std::min(front, c.z);
        }
        OrientedRect rect = min_area_rect(pts);

        BoxObservation o;
        o.id = box.id;
        o.metric = true;
        o.rect_center_m = rect.center;
        o.rect_size_m = rect.size;
        o.rect_angle = rect.angle;
        o.front_z = std::max(0.0, front);
        obs.boxes.push_back(std::move(o));
    }
    return obs;
}

}  // namespace shelfsim
