#include "shelfsim/planners.hpp"

#include <algorithm>
#include <atomic>
#include <map>

#include "shelfsim/errors.hpp"
#include "shelfsim/parallel.hpp"

namespace shelfsim {

const char* to_string(Approach a) {
    return a == Approach::PHYSICS ? "physics" : "heuristic";
}

Approach approach_from_string(const std::string& s) {
    if (s == "physics") return Approach::PHYSICS;
    if (s == "heuristic") return Approach::HEURISTIC;
    throw ParseError("unknown approach: " + s);
}

namespace {

// K sample worlds sharing the attempt/apply/rollback lifecycle of a planning
// session, plus the bookkeeping the plan stats need.
class SampleEnsemble {
public:
    SampleEnsemble(const ObservationSet& obs, const SimConfig& cfg,
                   const CollapseThresholds& thresholds, const PlannerOptions& opts)
        : thresholds_(thresholds), threads_(opts.threads) {
        samples_ = sample_batch(obs, cfg, cfg.rng_seed, opts.k);
        worlds_.reserve(samples_.size());
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            SimConfig world_cfg = cfg;
            world_cfg.rng_seed = derive_seed(cfg.rng_seed, i);
            worlds_.emplace_back(samples_[i].scene, world_cfg);
        }
    }

    // Runs the removal on every sample world; follow with keep() to leave
    // the worlds advanced or rollback() to restore the pre-attempt state.
    AggregatedOutcome attempt(const BoxId& box) {
        std::vector<RemovalOutcome> outcomes(worlds_.size());
        parallel_for(
            worlds_.size(),
            [&](std::size_t i) {
                World& w = worlds_[i];
                w.push_snapshot();
                std::uint64_t before = w.step_count();
                outcomes[i] = run_removal(w, box, thresholds_);
                sim_steps_ += w.step_count() - before;
            },
            threads_);
        ++attempts_;
        return aggregate(std::move(outcomes));
    }

    void keep() {
        for (World& w : worlds_) w.discard_snapshot();
    }
    void rollback() {
        for (World& w : worlds_) w.restore_snapshot();
    }

    std::size_t sample_count() const { return worlds_.size(); }
    std::uint64_t attempts() const { return attempts_; }
    PlanStats stats() const {
        PlanStats s;
        s.simulations_run = attempts_ * worlds_.size();
        s.planning_time_s = static_cast<double>(sim_steps_) *
                            worlds_.front().config().timestep;
        return s;
    }

private:
    CollapseThresholds thresholds_;
    unsigned threads_;
    std::vector<SceneSample> samples_;
    std::vector<World> worlds_;
    std::uint64_t attempts_ = 0;
    std::atomic<std::uint64_t> sim_steps_{0};
};

std::vector<MetricFace> faces_sorted_by_height(const ObservationSet& obs) {
    auto faces = metric_faces(obs);
    std::stable_sort(faces.begin(), faces.end(), [](const MetricFace& a, const MetricFace& b) {
        if (a.center.y != b.center.y) return a.center.y > b.center.y;
        if (a.center.x != b.center.x) return a.center.x < b.center.x;
        return a.id < b.id;
    });
    return faces;
}

std::string prefix_key(const std::vector<PlannedAction>& plan, const BoxId& action) {
    std::vector<BoxId> ids;
    ids.reserve(plan.size());
    for (const PlannedAction& a : plan) ids.push_back(a.box);
    std::sort(ids.begin(), ids.end());
    std::string key;
    for (const BoxId& id : ids) {
        key += id;
        key += ',';
    }
    key += "->";
    key += action;
    return key;
}

}  // namespace

ActionPlan plan_extraction_physics(const ObservationSet& obs, const BoxId& target,
                                   const SimConfig& cfg, const CollapseThresholds& thresholds,
                                   const PlannerOptions& opts) {
    if (!obs.has(target)) throw UnknownBox(target);
    if (opts.k < 1) throw InvalidInput("k must be at least 1");
    thresholds.validate();

    SampleEnsemble ensemble(obs, cfg, thresholds, opts);
    const std::uint64_t budget =
        static_cast<std::uint64_t>(obs.boxes.size()) * obs.boxes.size();

    ActionPlan plan;
    plan.approach = Approach::PHYSICS;
    plan.target = target;

    std::set<std::string> attempted;
    std::vector<std::string> trace;
    BoxId action = target;

    for (;;) {
        if (ensemble.attempts() >= budget) {
            throw PlanNotFound("simulation budget exhausted before a safe order was found",
                               trace);
        }
        std::string key = prefix_key(plan.actions, action);
        if (!attempted.insert(key).second) {
            throw PlanNotFound("cyclic collapse structure: '" + action +
                                   "' already failed under this prefix",
                               trace);
        }

        AggregatedOutcome outcome = ensemble.attempt(action);
        if (!outcome.any_collapse()) {
            ensemble.keep();
            trace.push_back(key + " ok");
            PlannedAction planned;
            planned.box = action;
            planned.predicted_safe = true;
            planned.predicted = outcome;
            plan.actions.push_back(std::move(planned));
            if (action == target) break;
            action = target;
        } else {
            ensemble.rollback();
            if (!outcome.first_collapsed_mode) {
                throw PlanNotFound("collapse without an identifiable first box", trace);
            }
            trace.push_back(key + " collapsed, first=" + *outcome.first_collapsed_mode);
            action = *outcome.first_collapsed_mode;
        }
    }

    plan.stats = ensemble.stats();
    return plan;
}

ActionPlan plan_clearance_physics(const ObservationSet& obs, const SimConfig& cfg,
                                  const CollapseThresholds& thresholds,
                                  const PlannerOptions& opts) {
    if (obs.boxes.empty()) throw InvalidInput("no boxes observed");
    if (opts.k < 1) throw InvalidInput("k must be at least 1");
    thresholds.validate();

    SampleEnsemble ensemble(obs, cfg, thresholds, opts);

    ActionPlan plan;
    plan.approach = Approach::PHYSICS;

    std::vector<BoxId> remaining;
    for (const BoxObservation& b : obs.boxes) remaining.push_back(b.id);

    auto sweep = [&](bool strict) {
        bool progress = false;
        for (const BoxId& id : std::vector<BoxId>(remaining)) {
            AggregatedOutcome outcome = ensemble.attempt(id);
            bool accept = strict ? outcome.safe : !outcome.any_collapse();
            if (accept) {
                ensemble.keep();
                PlannedAction planned;
                planned.box = id;
                planned.predicted_safe = !outcome.any_collapse();
                planned.predicted = outcome;
                plan.actions.push_back(std::move(planned));
                remaining.erase(std::find(remaining.begin(), remaining.end(), id));
                progress = true;
            } else {
                ensemble.rollback();
            }
        }
        return progress;
    };

    while (!remaining.empty()) {
        // Strict sweep first: only perfectly quiet removals. If a whole pass
        // stalls, allow sub-threshold shifts before giving up; collapses are
        // never accepted.
        bool progress = sweep(true);
        if (!progress) progress = sweep(false);
        if (!progress) {
            UnclearableResidue err(remaining);
            for (const PlannedAction& a : plan.actions) err.partial_plan.push_back(a.box);
            throw err;
        }
    }

    plan.stats = ensemble.stats();
    return plan;
}

ActionPlan plan_extraction_heuristic(const ObservationSet& obs, const BoxId& target) {
    if (!obs.has(target)) throw UnknownBox(target);
    ActionPlan plan;
    plan.approach = Approach::HEURISTIC;
    plan.target = target;
    for (const MetricFace& f : faces_sorted_by_height(obs)) {
        PlannedAction a;
        a.box = f.id;
        plan.actions.push_back(std::move(a));
        if (f.id == target) break;
    }
    return plan;
}

ActionPlan plan_clearance_heuristic(const ObservationSet& obs) {
    if (obs.boxes.empty()) throw InvalidInput("no boxes observed");
    ActionPlan plan;
    plan.approach = Approach::HEURISTIC;
    for (const MetricFace& f : faces_sorted_by_height(obs)) {
        PlannedAction a;
        a.box = f.id;
        plan.actions.push_back(std::move(a));
    }
    return plan;
}

ExecutionReport validate_plan(const Scene& truth, const ActionPlan& plan, const SimConfig& cfg,
                              const CollapseThresholds& thresholds, StepSink* sink) {
    thresholds.validate();
    for (const PlannedAction& a : plan.actions)
        if (!truth.find(a.box)) throw UnknownBox(a.box);

    ExecutionReport report;
    if (plan.actions.empty()) return report;

    World w(truth, cfg);
    for (const PlannedAction& a : plan.actions) {
        RemovalOutcome outcome = run_removal(w, a.box, thresholds, sink);
        ++report.boxes_removed;
        if (outcome.classification == Classification::COLLAPSE) {
            report.success = false;
            report.collapsed_during_execution.insert(outcome.collapsed_boxes.begin(),
                                                     outcome.collapsed_boxes.end());
            break;
        }
    }
    report.estimated_time = report.boxes_removed * cfg.per_pick_cost;
    return report;
}

}  // namespace shelfsim
