#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "shelfsim/bench.hpp"
#include "shelfsim/errors.hpp"
#include "shelfsim/json_io.hpp"

using namespace shelfsim;

TEST_CASE("efficiency improvement formula") {
    CHECK(efficiency_improvement(56.16, 37.56) == doctest::Approx(49.52).epsilon(2e-4));
    CHECK(efficiency_improvement(64.08, 32.06) == doctest::Approx(99.88).epsilon(1e-4));
    CHECK(efficiency_improvement(62.62, 31.70) == doctest::Approx(97.54).epsilon(1e-4));
    CHECK(efficiency_improvement(40.0, 40.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)efficiency_improvement(10.0, 0.0), InvalidInput);
    CHECK_THROWS_AS((void)efficiency_improvement(10.0, -1.0), InvalidInput);
}

TEST_CASE("efficiency improvement is scale-invariant and sign-antisymmetric") {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        double bh = rng.uniform(1.0, 100.0);
        double pa = rng.uniform(1.0, 100.0);
        double c = rng.uniform(0.1, 10.0);
        CHECK(efficiency_improvement(bh, pa) ==
              doctest::Approx(efficiency_improvement(c * bh, c * pa)).epsilon(1e-9));
        double e = efficiency_improvement(bh, pa);
        if (bh > pa) CHECK(e > 0.0);
        if (bh < pa) CHECK(e < 0.0);
    }
}

TEST_CASE("structured generator builds the 3x3 cube grid") {
    CorpusSpec spec;
    spec.kind = CorpusKind::STRUCTURED;
    spec.boxes_min = spec.boxes_max = 9;
    spec.box_catalog = {{0.20, 0.20, 0.20}};
    spec.seed = 7;

    GeneratedScene g = generate_scene(spec, 0);
    CHECK(g.scene.boxes.size() == 9);

    std::set<int> height_mm;
    for (const RigidBox& b : g.scene.boxes) {
        CHECK(b.yaw == 0.0);
        height_mm.insert(static_cast<int>(std::lround(b.position.y * 1000)));
    }
    CHECK(height_mm == std::set<int>{100, 300, 500});
    CHECK(g.observation.boxes.size() == 9);

    // determinism
    GeneratedScene again = generate_scene(spec, 0);
    CHECK(again.scene == g.scene);
    GeneratedScene other = generate_scene(spec, 0 + 0);
    spec.seed = 8;
    CHECK_FALSE(generate_scene(spec, 0).scene == g.scene);
    (void)other;
}

TEST_CASE("unstructured generator emits settled, samplable scenes") {
    CorpusSpec spec;
    spec.kind = CorpusKind::UNSTRUCTURED;
    spec.boxes_min = 4;
    spec.boxes_max = 7;
    spec.seed = 3;
    spec.n_scenes = 4;

    for (int i = 0; i < spec.n_scenes; ++i) {
        GeneratedScene g = generate_scene(spec, i);
        CHECK(g.scene.boxes.size() >= 4);
        CHECK_NOTHROW(g.scene.validate());

        // the emitted truth is at rest: re-settling barely moves anything
        SimConfig cfg;
        World w(g.scene, cfg);
        auto disp = w.settle(1.0);
        for (const auto& [id, d] : disp) CHECK(d < 0.006);
        CHECK(w.total_kinetic_energy() < 1e-4);

        // the observation round-trips through depth sampling
        auto samples = sample_batch(g.observation, cfg, 42, 10);
        CHECK(samples.size() == 10);

        GeneratedScene again = generate_scene(spec, i);
        CHECK(again.scene == g.scene);
    }
}

TEST_CASE("shipped fixture files match their builders") {
    CHECK(scene_from_json(load_json_file(std::string(SHELFSIM_SOURCE_DIR) +
                                         "/scenes/structured_demo.scene.json")) ==
          structured_demo_scene());
    CHECK(scene_from_json(load_json_file(std::string(SHELFSIM_SOURCE_DIR) +
                                         "/scenes/unstructured_counterexample.scene.json")) ==
          unstructured_counterexample());
    CHECK(scene_from_json(load_json_file(std::string(SHELFSIM_SOURCE_DIR) +
                                         "/scenes/dependency_chain.scene.json")) ==
          dependency_chain_scene());
}

TEST_CASE("lone-box corpus benchmarks both approaches as equals") {
    CorpusSpec spec;
    spec.kind = CorpusKind::UNSTRUCTURED;
    spec.n_scenes = 4;
    spec.boxes_min = spec.boxes_max = 1;
    spec.seed = 5;

    SimConfig cfg;
    BenchOptions opts;
    opts.k = 4;
    BenchReport report =
        run_benchmark(spec, BenchTask::EXTRACT_EVERY_BOX, cfg, CollapseThresholds{}, opts);

    CHECK(report.physics.success_rate == doctest::Approx(1.0));
    CHECK(report.heuristic.success_rate == doctest::Approx(1.0));
    CHECK(report.physics.avg_est_time_s ==
          doctest::Approx(report.heuristic.avg_est_time_s));
    REQUIRE(report.efficiency_improvement_pct.has_value());
    CHECK(*report.efficiency_improvement_pct == doctest::Approx(0.0));
    CHECK(report.success_rate_delta_pp == doctest::Approx(0.0));
}

TEST_CASE("benchmark rows account every (scene,target) pair once per approach") {
    CorpusSpec spec;
    spec.kind = CorpusKind::STRUCTURED;
    spec.n_scenes = 2;
    spec.boxes_min = spec.boxes_max = 4;
    spec.box_catalog = {{0.20, 0.20, 0.20}};
    spec.seed = 9;

    SimConfig cfg;
    BenchOptions opts;
    opts.k = 4;
    BenchReport report =
        run_benchmark(spec, BenchTask::EXTRACT_EVERY_BOX, cfg, CollapseThresholds{}, opts);

    std::set<std::string> seen;
    for (const BenchRow& r : report.rows) {
        std::string key = std::to_string(r.scene_id) + "/" + r.target + "/" +
                          to_string(r.approach);
        CHECK(seen.insert(key).second);
    }
    CHECK(report.rows.size() == 2 * 4 * 2);

    // byte-identical CSV on a rerun
    BenchReport again =
        run_benchmark(spec, BenchTask::EXTRACT_EVERY_BOX, cfg, CollapseThresholds{}, opts);
    CHECK(to_csv(report.rows) == to_csv(again.rows));
}

TEST_CASE("clear task benchmarks one row per scene per approach") {
    CorpusSpec spec;
    spec.kind = CorpusKind::STRUCTURED;
    spec.n_scenes = 2;
    spec.boxes_min = spec.boxes_max = 3;
    spec.box_catalog = {{0.20, 0.20, 0.20}};
    spec.seed = 13;

    SimConfig cfg;
    BenchOptions opts;
    opts.k = 4;
    BenchReport report = run_benchmark(spec, BenchTask::CLEAR, cfg, CollapseThresholds{}, opts);
    CHECK(report.rows.size() == 4);
    for (const BenchRow& r : report.rows) {
        CHECK(r.target.empty());
        CHECK(r.boxes_removed == 3);
        CHECK(r.success);
    }
}

TEST_CASE("corpus spec validation") {
    CorpusSpec spec;
    spec.n_scenes = 0;
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    spec = CorpusSpec{};
    spec.box_catalog.clear();
    CHECK_THROWS_AS(spec.validate(), InvalidInput);
    CHECK_THROWS_AS((void)generate_scene(CorpusSpec{}, 5), InvalidInput);  // index range
}
