#ifndef SHELFSIM_PHYSICS_HPP
#define SHELFSIM_PHYSICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shelfsim/contact.hpp"
#include "shelfsim/geometry.hpp"
#include "shelfsim/scene.hpp"

namespace shelfsim {

struct SimConfig {
    double gravity = 9.81;                // m/s^2
    double density = 1.0;                 // kg/m^3
    double surface_friction = 0.75;
    double spinning_friction = 0.01;
    double timestep = 1.0 / 240.0;        // s
    int solver_iterations = 10;
    double contact_slop = 0.002;          // m
    double settle_time = 0.5;             // s
    // Per-axis std of the random shake applied while a box is being pulled.
    // Calibrated so that stable configurations never cross the collapse
    // thresholds from shaking alone; the lightest plausible box here weighs
    // about 0.02 N, so the kicks stay a small fraction of any box's weight.
    // Knife-edge balances still topple: they are unstable to any perturbation.
    double disturbance_force_std = 0.0005;  // N
    double extraction_speed = 0.15;       // m/s
    double monitor_time = 1.5;            // s
    std::uint64_t rng_seed = 0;
    double depth_min = 0.05;              // m, smallest plausible box depth
    double per_pick_cost = 22.0;          // s per executed removal, for reporting

    void validate() const;  // throws InvalidInput
};

class World;

// Observer fed once per simulation step (trajectory dumps, debugging).
struct StepSink {
    virtual void on_step(const World& w) = 0;
    virtual ~StepSink() = default;
};

// Dynamic state of one collider inside a World. Boxes from the scene come
// first, followed by the static shelf bodies.
struct Body {
    BoxId id;
    Vec3 half;
    double mass = 0.0;
    double inv_mass = 0.0;        // 0 for statics and the driven box
    Vec3 inv_inertia_local;       // diagonal, body frame
    Vec3 position;
    Quat orientation;
    Vec3 linear_velocity;
    Vec3 angular_velocity;
    Vec3 external_force;          // consumed and cleared by the next step
    bool removed = false;
    bool driven = false;
    bool is_static = false;

    ObbPose pose() const { return {position, orientation, half}; }
    double kinetic_energy() const;

    bool operator==(const Body&) const = default;
};

// Persistent contact impulses carried between steps (solver warm start).
// Part of the restorable state: they influence trajectories.
struct CachedContactPoint {
    Vec3 position;
    double acc_n = 0.0, acc_t1 = 0.0, acc_t2 = 0.0;

    bool operator==(const CachedContactPoint&) const = default;
};

struct CachedManifold {
    int a = -1, b = -1;
    double twist = 0.0;
    std::vector<CachedContactPoint> points;

    bool operator==(const CachedManifold&) const = default;
};

// Full restorable state. Restoring reproduces trajectories bit for bit.
struct WorldState {
    std::vector<Body> bodies;
    double elapsed = 0.0;
    std::uint64_t step_count = 0;
    std::uint64_t rng_state = 0;
    int driven_index = -1;
    std::vector<CachedManifold> contact_cache;

    bool operator==(const WorldState&) const = default;
};

class World {
public:
    World(const Scene& scene, const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const Shelf& shelf() const { return shelf_; }
    double elapsed() const { return elapsed_; }
    std::uint64_t step_count() const { return step_count_; }

    // Advances exactly one timestep. Throws SimulationExploded when any
    // body exceeds 100 m/s.
    void step();

    // Steps for ceil(duration/dt) steps; returns net centroid displacement
    // per box since the call.
    std::map<BoxId, double> settle(double duration);

    // Marks the box kinematically driven toward the shelf front at
    // config().extraction_speed. It keeps generating contacts until its back
    // face clears the front plane, at which point it is flagged removed.
    void begin_extraction(const BoxId& id);
    bool extraction_active() const { return driven_index_ >= 0; }
    const Body* driven_body() const;

    // Queues a random force on every non-removed, non-driven box, drawn from
    // the world's deterministic generator (zero mean, per-axis std from
    // config). Consumed by the next step.
    void inject_disturbance();

    void push_snapshot();
    void restore_snapshot();   // pop and apply
    void discard_snapshot();   // pop without applying
    std::size_t snapshot_depth() const { return snapshots_.size(); }

    WorldState state() const;
    void set_state(const WorldState& s);

    std::size_t box_count() const { return box_count_; }   // scene boxes only
    const Body& body(std::size_t i) const { return bodies_[i]; }
    const Body& body(const BoxId& id) const;               // throws UnknownBox
    std::optional<std::size_t> index_of(const BoxId& id) const;
    const std::vector<Body>& bodies() const { return bodies_; }

    double total_kinetic_energy() const;
    Vec3 total_linear_momentum() const;

    // Exports the current configuration as a Scene. Boxes whose orientation
    // has left the yaw plane by more than `out_of_plane_tol` radians cannot
    // be represented and raise InvalidScene.
    Scene to_scene(double out_of_plane_tol = 0.05) const;

    Rng& rng() { return rng_; }

private:
    void integrate_velocities();
    void collect_manifolds();
    void solve_velocity_constraints();
    void integrate_positions();
    void finish_extraction_if_cleared();

    SimConfig cfg_;
    Shelf shelf_;
    std::vector<Body> bodies_;
    std::size_t box_count_ = 0;
    double elapsed_ = 0.0;
    std::uint64_t step_count_ = 0;
    int driven_index_ = -1;
    Rng rng_;
    std::vector<WorldState> snapshots_;
    std::vector<CachedManifold> cache_;
};

}  // namespace shelfsim

#endif
