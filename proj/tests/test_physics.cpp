#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shelfsim/errors.hpp"
#include "shelfsim/physics.hpp"

using namespace shelfsim;

namespace {

RigidBox make_box(const BoxId& id, Vec3 half, Vec3 pos, double yaw = 0.0) {
    RigidBox b;
    b.id = id;
    b.half_extents = half;
    b.position = pos;
    b.yaw = yaw;
    return b;
}

Scene cube_stack(int n, double size = 0.2, double x = 0.5, double z = 0.15) {
    Scene s;
    double h = size / 2;
    for (int i = 0; i < n; ++i)
        s.boxes.push_back(make_box("b" + std::to_string(i), {h, h, h},
                                   {x, h + i * size, z}));
    return s;
}

}  // namespace

TEST_CASE("resting box stays in static equilibrium after one step") {
    World w(cube_stack(1), SimConfig{});
    w.step();
    CHECK(length(w.body("b0").linear_velocity) < 1e-3);
}

TEST_CASE("free fall matches the closed-form velocity exactly") {
    SimConfig cfg;
    Scene s;
    s.boxes.push_back(make_box("faller", {0.05, 0.05, 0.05}, {0.5, 1.2, 0.15}));
    World w(s, cfg);
    const int n = 50;
    for (int i = 0; i < n; ++i) w.step();
    CHECK(std::fabs(w.body("faller").linear_velocity.y + cfg.gravity * n * cfg.timestep) <
          1e-9);
}

TEST_CASE("three-cube stack settles within the displacement gate") {
    World w(cube_stack(3), SimConfig{});
    auto disp = w.settle(2.0);
    double max_disp = 0.0;
    for (const auto& [id, d] : disp) max_disp = std::max(max_disp, d);
    CHECK(max_disp < 0.005);
    CHECK(w.total_kinetic_energy() < 1e-4);
}

TEST_CASE("kinetic energy does not grow after settling") {
    World w(cube_stack(3), SimConfig{});
    w.settle(2.0);
    double ke = w.total_kinetic_energy();
    CHECK(ke < 1e-4);
    for (int i = 0; i < 5 * 240; ++i) w.step();
    CHECK(w.total_kinetic_energy() < 1e-4);
    CHECK(w.total_kinetic_energy() <= ke * 10 + 1e-6);
}

TEST_CASE("settle reports the drop height of a floating box") {
    Scene s = cube_stack(1);
    s.boxes[0].position.y += 0.01;  // 1 cm above the floor
    World w(s, SimConfig{});
    auto disp = w.settle(1.0);
    CHECK(disp["b0"] == doctest::Approx(0.01).epsilon(0.3));
    CHECK(w.total_kinetic_energy() < 1e-6);
    CHECK(w.body("b0").position.y == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("interpenetrating pair separates gently") {
    Scene s;
    s.boxes.push_back(make_box("a", {0.1, 0.1, 0.1}, {0.5, 0.1, 0.15}));
    s.boxes.push_back(make_box("b", {0.1, 0.1, 0.1}, {0.5, 0.29, 0.15}));  // 1 cm overlap
    World w(s, SimConfig{});
    double max_speed = 0.0;
    for (int i = 0; i < 240; ++i) {
        w.step();
        max_speed = std::max(max_speed, length(w.body("b").linear_velocity));
        max_speed = std::max(max_speed, length(w.body("a").linear_velocity));
    }
    CHECK(max_speed < 0.2);
    double gap_overlap = (w.body("a").position.y + 0.1) - (w.body("b").position.y - 0.1);
    CHECK(gap_overlap < w.config().contact_slop + 1e-4);
}

TEST_CASE("already-resting scene settles with sub-slop displacement") {
    World w(cube_stack(2), SimConfig{});
    w.settle(0.5);
    auto disp = w.settle(0.5);
    for (const auto& [id, d] : disp) CHECK(d < w.config().contact_slop);
}

TEST_CASE("extraction clears a lone box at the configured speed") {
    SimConfig cfg;
    Scene s;
    s.boxes.push_back(make_box("target", {0.1, 0.1, 0.1}, {0.5, 0.1, 0.1}));  // front at z=0
    World w(s, cfg);
    w.settle(0.2);
    w.begin_extraction("target");
    CHECK(w.extraction_active());
    int steps = 0;
    while (w.extraction_active() && steps < 2000) {
        w.step();
        ++steps;
    }
    CHECK(w.body("target").removed);
    double expected = 0.2 / cfg.extraction_speed;  // back face must travel its z extent
    CHECK(steps * cfg.timestep == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("extraction drags the box stacked on top through friction") {
    SimConfig cfg;
    World w(cube_stack(2), cfg);
    w.settle(0.5);
    w.begin_extraction("b0");
    for (int i = 0; i < 24; ++i) w.step();  // 0.1 s of pulling
    CHECK(w.body("b1").linear_velocity.z < -1e-3);
}

TEST_CASE("extracting a contact-free box leaves every other box untouched") {
    Scene s;
    s.boxes.push_back(make_box("target", {0.1, 0.1, 0.1}, {0.2, 0.1, 0.12}));
    s.boxes.push_back(make_box("bystander", {0.1, 0.1, 0.1}, {0.7, 0.1, 0.12}));
    SimConfig cfg;
    World w(s, cfg);
    w.settle(0.5);
    WorldState before = w.state();
    w.begin_extraction("target");
    while (w.extraction_active()) w.step();
    const Body& bystander = w.body("bystander");
    std::size_t idx = *w.index_of("bystander");
    // micrometer numerical creep allowed; anything contact-borne is larger
    CHECK(length(bystander.position - before.bodies[idx].position) < 1e-5);
}

TEST_CASE("begin_extraction validates its target") {
    World w(cube_stack(1), SimConfig{});
    CHECK_THROWS_AS(w.begin_extraction("missing"), UnknownBox);
    w.begin_extraction("b0");
    while (w.extraction_active()) w.step();
    CHECK_THROWS_AS(w.begin_extraction("b0"), AlreadyRemoved);
}

TEST_CASE("zero disturbance std leaves the trajectory untouched") {
    SimConfig cfg;
    cfg.disturbance_force_std = 0.0;
    World a(cube_stack(3), cfg);
    World b(cube_stack(3), cfg);
    for (int i = 0; i < 120; ++i) {
        a.inject_disturbance();
        a.step();
        b.step();
    }
    CHECK(a.state() == b.state());
}

TEST_CASE("disturbance sequences are reproducible per seed") {
    SimConfig cfg;
    cfg.rng_seed = 77;
    World a(cube_stack(3), cfg);
    World b(cube_stack(3), cfg);
    for (int i = 0; i < 120; ++i) {
        a.inject_disturbance();
        b.inject_disturbance();
        a.step();
        b.step();
    }
    CHECK(a.state() == b.state());
}

TEST_CASE("default disturbances never destabilize a stable stack") {
    SimConfig cfg;
    cfg.rng_seed = 5;
    World w(cube_stack(3), cfg);
    w.settle(cfg.settle_time);
    std::vector<Vec3> baseline;
    for (std::size_t i = 0; i < w.box_count(); ++i) baseline.push_back(w.body(i).position);

    auto monitor_steps = static_cast<int>(cfg.monitor_time / cfg.timestep);
    for (int i = 0; i < monitor_steps; ++i) {
        w.inject_disturbance();
        w.step();
    }
    for (std::size_t i = 0; i < w.box_count(); ++i) {
        CHECK(length(w.body(i).position - baseline[i]) < 0.02);
        CHECK(length(w.body(i).linear_velocity) < 0.10);
    }
}

TEST_CASE("snapshot and restore round-trip bit-identically") {
    SimConfig cfg;
    cfg.rng_seed = 11;
    World w(cube_stack(3), cfg);
    w.settle(0.3);
    w.push_snapshot();
    WorldState saved = w.state();

    w.begin_extraction("b0");
    for (int i = 0; i < 100; ++i) {
        w.inject_disturbance();
        w.step();
    }
    CHECK_FALSE(w.state() == saved);

    w.restore_snapshot();
    CHECK(w.state() == saved);

    // subsequent trajectories from restored and pristine states are identical
    World fresh(cube_stack(3), cfg);
    fresh.settle(0.3);
    for (int i = 0; i < 100; ++i) {
        w.step();
        fresh.step();
    }
    CHECK(w.state() == fresh.state());
}

TEST_CASE("identical seeds give bit-identical trajectories") {
    SimConfig cfg;
    cfg.rng_seed = 123;
    World a(cube_stack(3), cfg);
    World b(cube_stack(3), cfg);
    a.begin_extraction("b1");
    b.begin_extraction("b1");
    for (int i = 0; i < 300; ++i) {
        a.inject_disturbance();
        b.inject_disturbance();
        a.step();
        b.step();
    }
    CHECK(a.state() == b.state());
}

TEST_CASE("linear momentum is conserved without gravity or statics in play") {
    SimConfig cfg;
    cfg.gravity = 0.0;
    Scene s;
    auto a = make_box("a", {0.05, 0.05, 0.05}, {0.3, 0.8, 0.15});
    auto b = make_box("b", {0.05, 0.05, 0.05}, {0.5, 0.8, 0.15});
    a.linear_velocity = {0.5, 0, 0};
    b.linear_velocity = {-0.5, 0, 0};
    s.boxes = {a, b};
    World w(s, cfg);
    Vec3 p0 = w.total_linear_momentum();
    for (int i = 0; i < 240; ++i) {
        w.step();
        Vec3 p = w.total_linear_momentum();
        CHECK(length(p - p0) < 1e-6);
    }
    // they actually collided and stopped approaching
    CHECK(w.body("a").linear_velocity.x <= 0.5);
}

TEST_CASE("simulation explosion is detected") {
    Scene s;
    auto b = make_box("wild", {0.05, 0.05, 0.05}, {0.5, 1.0, 0.15});
    b.linear_velocity = {0, 150.0, 0};
    s.boxes = {b};
    World w(s, SimConfig{});
    CHECK_THROWS_AS(w.step(), SimulationExploded);
}

TEST_CASE("config validation rejects out-of-range values") {
    SimConfig cfg;
    cfg.timestep = 1.0 / 60.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = SimConfig{};
    cfg.density = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = SimConfig{};
    CHECK_NOTHROW(cfg.validate());
}
