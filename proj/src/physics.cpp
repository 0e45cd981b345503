#include "shelfsim/physics.hpp"

#include <algorithm>
#include <cmath>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

constexpr double kExplosionSpeed = 100.0;  // m/s
constexpr double kPositionBeta = 0.2;      // fraction of excess penetration fixed per step
constexpr int kPositionIterations = 4;

Vec3 world_extent(const Mat3& rot, const Vec3& half) {
    // half-extent of the rotated box along each world axis
    Vec3 e;
    e.x = std::fabs(rot.m[0][0]) * half.x + std::fabs(rot.m[0][1]) * half.y +
          std::fabs(rot.m[0][2]) * half.z;
    e.y = std::fabs(rot.m[1][0]) * half.x + std::fabs(rot.m[1][1]) * half.y +
          std::fabs(rot.m[1][2]) * half.z;
    e.z = std::fabs(rot.m[2][0]) * half.x + std::fabs(rot.m[2][1]) * half.y +
          std::fabs(rot.m[2][2]) * half.z;
    return e;
}

struct ContactConstraint {
    int a, b;
    Vec3 r_a, r_b;      // contact offset from each centroid
    Vec3 normal;        // a -> b
    Vec3 t1, t2;
    double k_n, k_t1, k_t2;
    double penetration;
    double mu;          // per-contact friction coefficient
    double acc_n = 0.0, acc_t1 = 0.0, acc_t2 = 0.0;
    double pseudo_acc = 0.0;
};

struct ManifoldRange {
    int a, b;
    std::size_t first, count;
    Vec3 normal;
    double mu;
    double twist_accum;
    double patch_radius;
};

// Solver scratch, rebuilt every step. Worlds may run on separate threads;
// within a thread the buffers are only live inside one step() call.
thread_local std::vector<ContactConstraint> contacts_;
thread_local std::vector<ManifoldRange> manifolds_;

}  // namespace

void SimConfig::validate() const {
    auto positive = [](double v) { return v > 0.0; };
    // gravity and the disturbance std may be zeroed for controlled runs
    if (gravity < 0.0 || disturbance_force_std < 0.0 || !positive(density) ||
        !positive(surface_friction) || !positive(spinning_friction) || !positive(timestep) ||
        solver_iterations <= 0 || !positive(contact_slop) || !positive(settle_time) ||
        !positive(extraction_speed) || !positive(monitor_time) || !positive(depth_min) ||
        !positive(per_pick_cost))
        throw InvalidInput("all simulation parameters must be positive");
    if (timestep > 1.0 / 120.0 + 1e-12)
        throw InvalidInput("timestep must be at most 1/120 s");
}

double Body::kinetic_energy() const {
    if (inv_mass <= 0.0) return 0.0;
    double lin = 0.5 * mass * length_sq(linear_velocity);
    // world inertia: R I R^T
    Mat3 rot = orientation.to_mat3();
    Vec3 w_local = rot.transposed() * angular_velocity;
    Vec3 inertia_local{inv_inertia_local.x > 0 ? 1.0 / inv_inertia_local.x : 0.0,
                       inv_inertia_local.y > 0 ? 1.0 / inv_inertia_local.y : 0.0,
                       inv_inertia_local.z > 0 ? 1.0 / inv_inertia_local.z : 0.0};
    double ang = 0.5 * dot(w_local, comp_mul(inertia_local, w_local));
    return lin + ang;
}

World::World(const Scene& scene, const SimConfig& cfg) : cfg_(cfg), shelf_(scene.shelf) {
    cfg_.validate();
    scene.validate_structure(cfg_.contact_slop);
    rng_ = Rng(cfg_.rng_seed);

    bodies_.reserve(scene.boxes.size() + 4);
    for (const RigidBox& box : scene.boxes) {
        Body b;
        b.id = box.id;
        b.half = box.half_extents;
        b.mass = box.mass_for(cfg_.density);
        b.inv_mass = 1.0 / b.mass;
        b.inv_inertia_local = {
            3.0 / (b.mass * (box.half_extents.y * box.half_extents.y +
                             box.half_extents.z * box.half_extents.z)),
            3.0 / (b.mass * (box.half_extents.x * box.half_extents.x +
                             box.half_extents.z * box.half_extents.z)),
            3.0 / (b.mass * (box.half_extents.x * box.half_extents.x +
                             box.half_extents.y * box.half_extents.y))};
        b.position = box.position;
        b.orientation = box.orientation();
        b.linear_velocity = box.linear_velocity;
        b.angular_velocity = box.angular_velocity;
        b.removed = box.removed;
        bodies_.push_back(b);
    }
    box_count_ = bodies_.size();

    const Shelf& s = shelf_;
    const double t = s.wall_thickness;
    auto add_static = [&](const BoxId& id, Vec3 center, Vec3 half) {
        Body b;
        b.id = id;
        b.half = half;
        b.position = center;
        b.is_static = true;
        bodies_.push_back(b);
    };
    add_static("#floor", {s.width / 2, -t / 2, s.depth / 2}, {s.width / 2 + t, t / 2, s.depth / 2});
    add_static("#wall_back", {s.width / 2, s.height / 2, s.depth + t / 2},
               {s.width / 2 + t, s.height / 2, t / 2});
    if (s.has_side_walls) {
        add_static("#wall_left", {-t / 2, s.height / 2, s.depth / 2},
                   {t / 2, s.height / 2, s.depth / 2});
        add_static("#wall_right", {s.width + t / 2, s.height / 2, s.depth / 2},
                   {t / 2, s.height / 2, s.depth / 2});
    }
}

const Body* World::driven_body() const {
    return driven_index_ >= 0 ? &bodies_[static_cast<std::size_t>(driven_index_)] : nullptr;
}

const Body& World::body(const BoxId& id) const {
    for (std::size_t i = 0; i < box_count_; ++i)
        if (bodies_[i].id == id) return bodies_[i];
    throw UnknownBox(id);
}

std::optional<std::size_t> World::index_of(const BoxId& id) const {
    for (std::size_t i = 0; i < box_count_; ++i)
        if (bodies_[i].id == id) return i;
    return std::nullopt;
}

void World::begin_extraction(const BoxId& id) {
    auto idx = index_of(id);
    if (!idx) throw UnknownBox(id);
    Body& b = bodies_[*idx];
    if (b.removed) throw AlreadyRemoved(id);
    b.driven = true;
    b.inv_mass = 0.0;
    b.linear_velocity = {0.0, 0.0, -cfg_.extraction_speed};
    b.angular_velocity = {};
    driven_index_ = static_cast<int>(*idx);
}

void World::inject_disturbance() {
    if (cfg_.disturbance_force_std <= 0.0) return;
    for (std::size_t i = 0; i < box_count_; ++i) {
        Body& b = bodies_[i];
        if (b.removed || b.driven) continue;
        b.external_force += Vec3{rng_.gaussian(0.0, cfg_.disturbance_force_std),
                                 rng_.gaussian(0.0, cfg_.disturbance_force_std),
                                 rng_.gaussian(0.0, cfg_.disturbance_force_std)};
    }
}

WorldState World::state() const {
    return {bodies_, elapsed_, step_count_, rng_.state(), driven_index_, cache_};
}

void World::set_state(const WorldState& s) {
    bodies_ = s.bodies;
    elapsed_ = s.elapsed;
    step_count_ = s.step_count;
    rng_.set_state(s.rng_state);
    driven_index_ = s.driven_index;
    cache_ = s.contact_cache;
}

void World::push_snapshot() { snapshots_.push_back(state()); }

void World::restore_snapshot() {
    if (snapshots_.empty()) throw Error("restore with empty snapshot stack");
    set_state(snapshots_.back());
    snapshots_.pop_back();
}

void World::discard_snapshot() {
    if (snapshots_.empty()) throw Error("discard with empty snapshot stack");
    snapshots_.pop_back();
}

double World::total_kinetic_energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < box_count_; ++i)
        if (!bodies_[i].removed) e += bodies_[i].kinetic_energy();
    return e;
}

Vec3 World::total_linear_momentum() const {
    Vec3 p;
    for (std::size_t i = 0; i < box_count_; ++i) {
        const Body& b = bodies_[i];
        if (!b.removed && !b.is_static && b.inv_mass > 0.0) p += b.linear_velocity * b.mass;
    }
    return p;
}

Scene World::to_scene(double out_of_plane_tol) const {
    Scene scene;
    scene.shelf = shelf_;
    for (std::size_t i = 0; i < box_count_; ++i) {
        const Body& b = bodies_[i];
        RigidBox box;
        box.id = b.id;
        box.half_extents = b.half;
        box.position = b.position;
        box.removed = b.removed;
        if (!b.removed) {
            double tilt = b.orientation.out_of_plane_angle();
            if (tilt > out_of_plane_tol)
                throw InvalidScene("box " + b.id + " left the yaw plane");
        }
        box.yaw = b.orientation.yaw_angle();
        box.linear_velocity = b.linear_velocity;
        box.angular_velocity = b.angular_velocity;
        scene.boxes.push_back(box);
    }
    return scene;
}

void World::integrate_velocities() {
    const double dt = cfg_.timestep;
    for (Body& b : bodies_) {
        if (b.is_static || b.removed) continue;
        if (b.driven) {
            b.linear_velocity = {0.0, 0.0, -cfg_.extraction_speed};
            b.angular_velocity = {};
            b.external_force = {};
            continue;
        }
        b.linear_velocity.y -= cfg_.gravity * dt;
        b.linear_velocity += b.external_force * (b.inv_mass * dt);
        b.external_force = {};
    }
}

void World::collect_manifolds() {
    contacts_.clear();
    manifolds_.clear();

    const double slop = cfg_.contact_slop;
    const std::size_t n = bodies_.size();

    // cached world AABBs (inflated by slop)
    static thread_local std::vector<Vec3> lo, hi;
    lo.assign(n, {});
    hi.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const Body& b = bodies_[i];
        if (b.removed) continue;
        Vec3 e = world_extent(b.orientation.to_mat3(), b.half);
        lo[i] = b.position - e - Vec3{slop, slop, slop};
        hi[i] = b.position + e + Vec3{slop, slop, slop};
    }

    auto aabb_overlap = [&](std::size_t i, std::size_t j) {
        return lo[i].x <= hi[j].x && lo[j].x <= hi[i].x && lo[i].y <= hi[j].y &&
               lo[j].y <= hi[i].y && lo[i].z <= hi[j].z && lo[j].z <= hi[i].z;
    };

    auto add_pair = [&](std::size_t i, std::size_t j) {
        const Body& a = bodies_[i];
        const Body& b = bodies_[j];
        if (!aabb_overlap(i, j)) return;
        auto m = obb_contact_poses(a.pose(), b.pose(), slop);
        if (!m || m->points.empty()) return;

        // The gripper carries the held box, lifting it just clear of whatever
        // it was resting on: any downward-facing contact of the driven box
        // generates nothing. Neighbors resting on top of it keep full contact
        // and friction (they get dragged), and head-on blocking contacts
        // (horizontal normals) still collide.
        if ((a.driven && m->normal.y < -0.25) || (b.driven && m->normal.y > 0.25)) return;

        ManifoldRange range;
        range.a = static_cast<int>(i);
        range.b = static_cast<int>(j);
        range.first = contacts_.size();
        range.count = m->points.size();
        range.normal = m->normal;
        range.twist_accum = 0.0;
        range.mu = cfg_.surface_friction;

        const CachedManifold* cached = nullptr;
        // Driven-box manifolds solve from scratch: their steady-state impulse
        // is zero, so carried impulses only keep phantom friction alive.
        if (!a.driven && !b.driven) {
            for (const CachedManifold& cm : cache_) {
                if (cm.a == range.a && cm.b == range.b) {
                    cached = &cm;
                    break;
                }
            }
        }
        if (cached) range.twist_accum = cached->twist;

        Vec3 centroid;
        for (const ContactPoint& p : m->points) centroid += p.position;
        centroid *= 1.0 / static_cast<double>(m->points.size());
        double patch = 0.0;
        for (const ContactPoint& p : m->points) patch += length(p.position - centroid);
        range.patch_radius = patch / static_cast<double>(m->points.size());

        bool used[4] = {false, false, false, false};
        for (const ContactPoint& p : m->points) {
            ContactConstraint c;
            c.a = range.a;
            c.b = range.b;
            c.normal = m->normal;
            c.r_a = p.position - a.position;
            c.r_b = p.position - b.position;
            c.penetration = p.penetration;
            c.mu = range.mu;
            if (cached) {
                // match against the previous step's point set by proximity
                for (std::size_t k = 0; k < cached->points.size() && k < 4; ++k) {
                    if (used[k]) continue;
                    if (length_sq(cached->points[k].position - p.position) <
                        (2.0 * slop) * (2.0 * slop)) {
                        c.acc_n = cached->points[k].acc_n;
                        c.acc_t1 = cached->points[k].acc_t1;
                        c.acc_t2 = cached->points[k].acc_t2;
                        used[k] = true;
                        break;
                    }
                }
            }
            contacts_.push_back(c);
        }
        manifolds_.push_back(range);
    };

    for (std::size_t i = 0; i < box_count_; ++i) {
        if (bodies_[i].removed) continue;
        for (std::size_t j = i + 1; j < box_count_; ++j) {
            if (bodies_[j].removed) continue;
            add_pair(i, j);
        }
        for (std::size_t j = box_count_; j < n; ++j) add_pair(i, j);
    }
}

void World::solve_velocity_constraints() {
    // Per-body world-frame inverse inertia, rebuilt each step.
    static thread_local std::vector<Mat3> inv_inertia;
    inv_inertia.assign(bodies_.size(), Mat3{});
    for (std::size_t i = 0; i < bodies_.size(); ++i) {
        const Body& b = bodies_[i];
        if (b.inv_mass <= 0.0 || b.removed) continue;
        Mat3 rot = b.orientation.to_mat3();
        Mat3 d = Mat3::diagonal(b.inv_inertia_local.x, b.inv_inertia_local.y,
                                b.inv_inertia_local.z);
        inv_inertia[i] = rot * d * rot.transposed();
    }

    auto angular_term = [&](int body, const Vec3& r, const Vec3& dir) {
        Vec3 rn = cross(r, dir);
        return dot(rn, inv_inertia[static_cast<std::size_t>(body)] * rn);
    };

    // Precompute effective masses and a deterministic tangent basis.
    for (ContactConstraint& c : contacts_) {
        const Body& a = bodies_[static_cast<std::size_t>(c.a)];
        const Body& b = bodies_[static_cast<std::size_t>(c.b)];
        if (std::fabs(c.normal.y) < 0.9)
            c.t1 = normalized(cross(c.normal, Vec3{0, 1, 0}));
        else
            c.t1 = normalized(cross(c.normal, Vec3{1, 0, 0}));
        c.t2 = cross(c.normal, c.t1);
        c.k_n = a.inv_mass + b.inv_mass + angular_term(c.a, c.r_a, c.normal) +
                angular_term(c.b, c.r_b, c.normal);
        c.k_t1 = a.inv_mass + b.inv_mass + angular_term(c.a, c.r_a, c.t1) +
                 angular_term(c.b, c.r_b, c.t1);
        c.k_t2 = a.inv_mass + b.inv_mass + angular_term(c.a, c.r_a, c.t2) +
                 angular_term(c.b, c.r_b, c.t2);
    }

    auto velocity_at = [&](const Body& body, const Vec3& r) {
        return body.linear_velocity + cross(body.angular_velocity, r);
    };
    auto apply = [&](ContactConstraint& c, const Vec3& impulse) {
        Body& a = bodies_[static_cast<std::size_t>(c.a)];
        Body& b = bodies_[static_cast<std::size_t>(c.b)];
        a.linear_velocity -= impulse * a.inv_mass;
        a.angular_velocity -= inv_inertia[static_cast<std::size_t>(c.a)] * cross(c.r_a, impulse);
        b.linear_velocity += impulse * b.inv_mass;
        b.angular_velocity += inv_inertia[static_cast<std::size_t>(c.b)] * cross(c.r_b, impulse);
    };

    const double mu_spin = cfg_.spinning_friction;

    // warm start from the previous step's impulses
    for (ContactConstraint& c : contacts_) {
        Vec3 impulse = c.normal * c.acc_n + c.t1 * c.acc_t1 + c.t2 * c.acc_t2;
        if (c.acc_n != 0.0 || c.acc_t1 != 0.0 || c.acc_t2 != 0.0) apply(c, impulse);
    }
    for (ManifoldRange& m : manifolds_) {
        if (m.twist_accum == 0.0) continue;
        Vec3 impulse = m.normal * m.twist_accum;
        bodies_[static_cast<std::size_t>(m.a)].angular_velocity -=
            inv_inertia[static_cast<std::size_t>(m.a)] * impulse;
        bodies_[static_cast<std::size_t>(m.b)].angular_velocity +=
            inv_inertia[static_cast<std::size_t>(m.b)] * impulse;
    }

    for (int it = 0; it < cfg_.solver_iterations; ++it) {
        for (ManifoldRange& m : manifolds_) {
            Body& a = bodies_[static_cast<std::size_t>(m.a)];
            Body& b = bodies_[static_cast<std::size_t>(m.b)];

            double normal_sum = 0.0;
            for (std::size_t k = m.first; k < m.first + m.count; ++k) {
                ContactConstraint& c = contacts_[k];
                if (c.k_n <= 0.0) continue;
                double vn = dot(c.normal, velocity_at(b, c.r_b) - velocity_at(a, c.r_a));
                double lambda = -vn / c.k_n;
                double next = std::max(c.acc_n + lambda, 0.0);
                double delta = next - c.acc_n;
                c.acc_n = next;
                if (delta != 0.0) apply(c, c.normal * delta);
                normal_sum += c.acc_n;
            }

            for (std::size_t k = m.first; k < m.first + m.count; ++k) {
                ContactConstraint& c = contacts_[k];
                double bound = c.mu * c.acc_n;
                if (c.k_t1 > 0.0) {
                    double vt = dot(c.t1, velocity_at(b, c.r_b) - velocity_at(a, c.r_a));
                    double next = std::clamp(c.acc_t1 - vt / c.k_t1, -bound, bound);
                    double delta = next - c.acc_t1;
                    c.acc_t1 = next;
                    if (delta != 0.0) apply(c, c.t1 * delta);
                }
                if (c.k_t2 > 0.0) {
                    double vt = dot(c.t2, velocity_at(b, c.r_b) - velocity_at(a, c.r_a));
                    double next = std::clamp(c.acc_t2 - vt / c.k_t2, -bound, bound);
                    double delta = next - c.acc_t2;
                    c.acc_t2 = next;
                    if (delta != 0.0) apply(c, c.t2 * delta);
                }
            }

            // torsional resistance about the manifold normal
            Vec3 n = m.normal;
            double k_tw = dot(n, inv_inertia[static_cast<std::size_t>(m.a)] * n) +
                          dot(n, inv_inertia[static_cast<std::size_t>(m.b)] * n);
            if (k_tw > 0.0 && m.patch_radius > 1e-9 && m.mu > 0.0) {
                double wn = dot(n, b.angular_velocity - a.angular_velocity);
                double bound = mu_spin * normal_sum * m.patch_radius;
                double next = std::clamp(m.twist_accum - wn / k_tw, -bound, bound);
                double delta = next - m.twist_accum;
                m.twist_accum = next;
                if (delta != 0.0) {
                    a.angular_velocity -= inv_inertia[static_cast<std::size_t>(m.a)] * (n * delta);
                    b.angular_velocity += inv_inertia[static_cast<std::size_t>(m.b)] * (n * delta);
                }
            }
        }
    }

    // persist impulses for the next step's warm start
    cache_.clear();
    cache_.reserve(manifolds_.size());
    for (const ManifoldRange& m : manifolds_) {
        CachedManifold cm;
        cm.a = m.a;
        cm.b = m.b;
        cm.twist = m.twist_accum;
        for (std::size_t k = m.first; k < m.first + m.count; ++k) {
            const ContactConstraint& c = contacts_[k];
            cm.points.push_back({bodies_[static_cast<std::size_t>(m.a)].position + c.r_a,
                                 c.acc_n, c.acc_t1, c.acc_t2});
        }
        cache_.push_back(std::move(cm));
    }

    // Split-impulse positional correction: pseudo velocities remove excess
    // penetration without feeding energy into the real velocities.
    static thread_local std::vector<Vec3> pv, pw;
    pv.assign(bodies_.size(), Vec3{});
    pw.assign(bodies_.size(), Vec3{});

    const double dt = cfg_.timestep;
    const double slop = cfg_.contact_slop;
    bool any = false;
    for (int it = 0; it < kPositionIterations; ++it) {
        for (ContactConstraint& c : contacts_) {
            if (c.penetration <= slop || c.k_n <= 0.0) continue;
            any = true;
            auto ai = static_cast<std::size_t>(c.a);
            auto bi = static_cast<std::size_t>(c.b);
            double target = kPositionBeta * (c.penetration - slop) / dt;
            double pvn = dot(c.normal, pv[bi] + cross(pw[bi], c.r_b) - pv[ai] - cross(pw[ai], c.r_a));
            double lambda = (target - pvn) / c.k_n;
            double next = std::max(c.pseudo_acc + lambda, 0.0);
            double delta = next - c.pseudo_acc;
            c.pseudo_acc = next;
            if (delta == 0.0) continue;
            Vec3 impulse = c.normal * delta;
            const Body& a = bodies_[ai];
            const Body& b = bodies_[bi];
            pv[ai] -= impulse * a.inv_mass;
            pw[ai] -= inv_inertia[ai] * cross(c.r_a, impulse);
            pv[bi] += impulse * b.inv_mass;
            pw[bi] += inv_inertia[bi] * cross(c.r_b, impulse);
        }
    }
    if (any) {
        for (std::size_t i = 0; i < bodies_.size(); ++i) {
            Body& b = bodies_[i];
            if (b.inv_mass <= 0.0 || b.removed) continue;
            b.position += pv[i] * dt;
            Vec3 w = pw[i] * dt;
            double angle = length(w);
            if (angle > 1e-12) {
                Quat dq = Quat::from_axis_angle(w, angle);
                b.orientation = (dq * b.orientation).normalized();
            }
        }
    }
}

void World::integrate_positions() {
    const double dt = cfg_.timestep;
    for (Body& b : bodies_) {
        if (b.is_static || b.removed) continue;
        b.position += b.linear_velocity * dt;
        const Vec3& w = b.angular_velocity;
        if (length_sq(w) > 0.0) {
            Quat wq{0.0, w.x, w.y, w.z};
            Quat dq = wq * b.orientation;
            b.orientation =
                Quat{b.orientation.w + 0.5 * dt * dq.w, b.orientation.x + 0.5 * dt * dq.x,
                     b.orientation.y + 0.5 * dt * dq.y, b.orientation.z + 0.5 * dt * dq.z}
                    .normalized();
        }
    }
}

void World::finish_extraction_if_cleared() {
    if (driven_index_ < 0) return;
    Body& b = bodies_[static_cast<std::size_t>(driven_index_)];
    double back = b.position.z + world_extent(b.orientation.to_mat3(), b.half).z;
    if (back < 0.0) {
        // the gripper holds it from here on
        b.removed = true;
        b.driven = false;
        b.linear_velocity = {};
        b.angular_velocity = {};
        driven_index_ = -1;
    }
}

void World::step() {
    integrate_velocities();
    collect_manifolds();
    solve_velocity_constraints();
    integrate_positions();
    finish_extraction_if_cleared();
    elapsed_ += cfg_.timestep;
    ++step_count_;

    for (std::size_t i = 0; i < box_count_; ++i) {
        const Body& b = bodies_[i];
        if (!b.removed && length(b.linear_velocity) > kExplosionSpeed)
            throw SimulationExploded("box " + b.id + " exceeded 100 m/s at t=" +
                                     std::to_string(elapsed_));
    }
}

std::map<BoxId, double> World::settle(double duration) {
    if (duration <= 0.0) throw InvalidInput("settle duration must be positive");
    std::vector<Vec3> start(box_count_);
    for (std::size_t i = 0; i < box_count_; ++i) start[i] = bodies_[i].position;

    auto steps = static_cast<std::uint64_t>(std::ceil(duration / cfg_.timestep));
    for (std::uint64_t s = 0; s < steps; ++s) step();

    std::map<BoxId, double> displacement;
    for (std::size_t i = 0; i < box_count_; ++i) {
        if (bodies_[i].removed) continue;
        displacement[bodies_[i].id] = length(bodies_[i].position - start[i]);
    }
    return displacement;
}

}  // namespace shelfsim
