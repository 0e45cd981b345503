#ifndef SHELFSIM_RECONSTRUCT_HPP
#define SHELFSIM_RECONSTRUCT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shelfsim/geometry.hpp"
#include "shelfsim/physics.hpp"
#include "shelfsim/scene.hpp"

namespace shelfsim {

struct Camera {
    double fx = 0.0, fy = 0.0;  // focal lengths, pixels
    double cx = 0.0, cy = 0.0;  // principal point, pixels
    double shelf_distance = 0.0;  // camera to shelf front plane, m
};

// One detected box: either a pixel-space rectangle (camera required) or a
// pre-converted metric rectangle in the shelf frame (synthetic corpora).
struct BoxObservation {
    BoxId id;

    // pixel-space fields
    Vec2 rect_center_px;
    Vec2 rect_size_px;   // min-area rectangle, pixels
    double rect_angle = 0.0;  // radians, in-plane
    double centroid_depth = 0.0;  // camera to front face, m

    // metric fields (used when `metric` is set)
    bool metric = false;
    Vec2 rect_center_m;  // shelf frame
    Vec2 rect_size_m;
    double front_z = 0.0;  // front face distance from the shelf front plane
};

struct ObservationSet {
    std::optional<Camera> camera;  // absent for metric observation files
    Shelf shelf;
    std::vector<BoxObservation> boxes;  // detection order

    void validate() const;  // throws InvalidInput
    bool has(const BoxId& id) const;
};

// Front-plane rectangle in camera coordinates: x right, y up, centered on
// the principal axis. Sizes follow the pinhole model, size_m = size_px * depth / f.
struct FrontRect {
    Vec2 center;
    Vec2 size;
    double yaw;
};

FrontRect pixel_to_metric(const BoxObservation& obs, const Camera& camera);

// Shelf-frame face: the camera principal axis is assumed to hit the center
// of the shelf front opening.
struct MetricFace {
    BoxId id;
    Vec2 center;  // x, y in shelf frame
    Vec2 size;
    double yaw;
    double front_z;
};

std::vector<MetricFace> metric_faces(const ObservationSet& obs);

struct SceneSample {
    Scene scene;
    std::uint64_t sample_seed = 0;
    std::map<BoxId, double> depth_assignment;  // sampled depth extent per box
};

// One depth-randomized reconstruction: observed width/height/yaw/x/y pass
// through untouched, the depth extent is drawn uniformly from
// [cfg.depth_min, shelf.depth - front_z]. Boxes whose image rectangles
// overlap are de-conflicted by shrinking the front box's depth only;
// irreconcilable observations raise UnsatisfiableObservation.
SceneSample sample_scene(const ObservationSet& obs, const SimConfig& cfg, std::uint64_t seed);

// K independent samples with seeds derived from base_seed.
std::vector<SceneSample> sample_batch(const ObservationSet& obs, const SimConfig& cfg,
                                      std::uint64_t base_seed, int k = 10);

// Front-view projection of a scene: the observation a perfect perception
// stack would emit (metric variant, no camera). Detection order = scene order.
ObservationSet observe_scene(const Scene& scene);

}  // namespace shelfsim

#endif
