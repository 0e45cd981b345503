#ifndef SHELFSIM_PLANNERS_HPP
#define SHELFSIM_PLANNERS_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shelfsim/collapse.hpp"
#include "shelfsim/reconstruct.hpp"

namespace shelfsim {

enum class Approach { PHYSICS, HEURISTIC };

const char* to_string(Approach a);
Approach approach_from_string(const std::string& s);

struct PlannedAction {
    BoxId box;
    // Physics plans predict each action; heuristic plans carry nothing.
    std::optional<bool> predicted_safe;
    std::optional<AggregatedOutcome> predicted;
};

struct PlanStats {
    std::uint64_t simulations_run = 0;
    // Deterministic cost proxy: total simulated seconds across every rollout
    // the planner ran. Wall time is reported on the console, never in files.
    double planning_time_s = 0.0;
};

struct ActionPlan {
    Approach approach = Approach::HEURISTIC;
    std::optional<BoxId> target;  // extraction tasks only; the final action
    std::vector<PlannedAction> actions;
    PlanStats stats;
};

struct PlannerOptions {
    int k = 10;           // depth samples per attempted removal
    unsigned threads = 0; // 0 = hardware concurrency
};

// Backtracking extraction planner: attempt the target on all K samples; on
// collapse, attempt the most frequent first-collapsed box instead; safe
// auxiliary removals stay applied and the target is retried. Bounded by N^2
// attempts and memoized per (removed-set, action) pair. Minor shifts do not
// veto an extraction; sustained collapse does.
ActionPlan plan_extraction_physics(const ObservationSet& obs, const BoxId& target,
                                   const SimConfig& cfg, const CollapseThresholds& thresholds,
                                   const PlannerOptions& opts = {});

// Multi-pass clearance sweep in detection order: safe removals stay applied,
// anything that shifts or collapses is skipped for the pass and retried next
// pass. A pass with no progress raises UnclearableResidue.
ActionPlan plan_clearance_physics(const ObservationSet& obs, const SimConfig& cfg,
                                  const CollapseThresholds& thresholds,
                                  const PlannerOptions& opts = {});

// Height heuristic: every box strictly before the target in descending
// centroid-height order (ties x ascending, then id), then the target.
ActionPlan plan_extraction_heuristic(const ObservationSet& obs, const BoxId& target);

// Height heuristic over the whole shelf.
ActionPlan plan_clearance_heuristic(const ObservationSet& obs);

struct ExecutionReport {
    bool success = true;
    int boxes_removed = 0;
    std::set<BoxId> collapsed_during_execution;
    double estimated_time = 0.0;  // boxes_removed * per_pick_cost
};

// Executes the plan against the ground-truth scene (no depth randomization),
// cumulatively, stopping at the first collapsing action. Minor shifts pass.
ExecutionReport validate_plan(const Scene& truth, const ActionPlan& plan, const SimConfig& cfg,
                              const CollapseThresholds& thresholds, StepSink* sink = nullptr);

}  // namespace shelfsim

#endif
