#ifndef SHELFSIM_BENCH_HPP
#define SHELFSIM_BENCH_HPP

#include <optional>
#include <string>
#include <vector>

#include "shelfsim/planners.hpp"

namespace shelfsim {

enum class CorpusKind { STRUCTURED, UNSTRUCTURED };

CorpusKind corpus_kind_from_string(const std::string& s);
const char* to_string(CorpusKind k);

struct CorpusSpec {
    CorpusKind kind = CorpusKind::STRUCTURED;
    int n_scenes = 1;
    int boxes_min = 4;
    int boxes_max = 8;
    // full dimension triples (w, h, d) in meters
    std::vector<Vec3> box_catalog = {{0.23, 0.31, 0.25}, {0.20, 0.20, 0.20}, {0.50, 0.17, 0.17}};
    std::uint64_t seed = 0;
    Shelf shelf;

    void validate() const;  // throws InvalidInput
};

struct GeneratedScene {
    Scene scene;              // ground truth (settled for unstructured)
    ObservationSet observation;  // front-view projection of the truth
};

// Deterministic per (spec.seed, index). Structured: grid-aligned columns
// with randomized per-box depth offsets. Unstructured: randomly placed
// motifs (stacks, leaners, loose boxes) with random yaw, physics-settled
// before emission.
GeneratedScene generate_scene(const CorpusSpec& spec, int index);

// 100 * (t_bh - t_pa) / t_pa; throws InvalidInput when t_pa <= 0.
double efficiency_improvement(double t_bh, double t_pa);

enum class BenchTask { EXTRACT_EVERY_BOX, CLEAR };

BenchTask bench_task_from_string(const std::string& s);
const char* to_string(BenchTask t);

struct BenchRow {
    int scene_id = 0;
    BoxId target;  // empty for CLEAR rows
    Approach approach = Approach::HEURISTIC;
    bool success = false;
    int boxes_removed = 0;
    double est_time_s = 0.0;
    double planning_time_s = 0.0;
    std::uint64_t sims_run = 0;
    std::string error;  // per-scene planner failures, recorded not fatal
};

struct ApproachSummary {
    double avg_boxes_removed = 0.0;
    double avg_est_time_s = 0.0;
    double success_rate = 0.0;  // in [0, 1]
    int runs = 0;
};

struct BenchReport {
    ApproachSummary physics;
    ApproachSummary heuristic;
    double success_rate_delta_pp = 0.0;  // percentage points
    std::optional<double> efficiency_improvement_pct;
    std::vector<BenchRow> rows;
    std::vector<std::string> errors;  // per-scene failures (generation etc.)
};

struct BenchOptions {
    int k = 10;
    unsigned threads = 0;
};

// Runs both planners on every scene (and, for EXTRACT_EVERY_BOX, on every
// box as target), validates the plans against ground truth, and aggregates.
// Scene-level failures are recorded in rows, never aborting the run.
BenchReport run_benchmark(const CorpusSpec& corpus, BenchTask task, const SimConfig& cfg,
                          const CollapseThresholds& thresholds, const BenchOptions& opts = {});

// Deterministic CSV (one row per (scene, target, approach)).
std::string to_csv(const std::vector<BenchRow>& rows);

// Curated demo scenes shipped with the repository.
Scene structured_demo_scene();       // two 3-stack columns; target "b2"
Scene unstructured_counterexample(); // leaning tall box; target "stack_bottom"
Scene dependency_chain_scene();      // vertical 3-stack; target "chain_0"

}  // namespace shelfsim

#endif
