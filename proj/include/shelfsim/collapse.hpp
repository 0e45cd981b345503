#ifndef SHELFSIM_COLLAPSE_HPP
#define SHELFSIM_COLLAPSE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shelfsim/physics.hpp"
#include "shelfsim/reconstruct.hpp"

namespace shelfsim {

// Calibrated against the static support oracle: genuine topples sweep past
// these with margin (a falling box turns at 4-6 rad/s), while the rotational
// relaxation transient of a box whose load was just lifted stays under them.
struct CollapseThresholds {
    double linear_speed = 0.10;    // m/s
    double angular_speed = 2.0;    // rad/s
    double displacement = 0.02;    // m, net centroid displacement
    int sustain_steps = 24;        // consecutive steps over a velocity threshold

    void validate() const;  // throws InvalidInput
};

enum class Classification { SAFE, MINOR_SHIFT, COLLAPSE };

const char* to_string(Classification c);
Classification classification_from_string(const std::string& s);

struct RemovalOutcome {
    BoxId removed;
    Classification classification = Classification::SAFE;
    std::vector<BoxId> collapsed_boxes;  // chronological by first threshold crossing
    std::optional<BoxId> first_collapsed;
    std::map<BoxId, double> max_displacement;  // peak over the window, per box

    bool operator==(const RemovalOutcome&) const = default;
};

struct AggregatedOutcome {
    std::vector<RemovalOutcome> per_sample;
    bool safe = true;  // every sample classified SAFE
    std::set<BoxId> collapse_union;
    std::optional<BoxId> first_collapsed_mode;  // mode across collapsing samples

    // At least one sample classified COLLAPSE. The extraction planner
    // tolerates minor shifts; the clearance planner keys on `safe`.
    bool any_collapse() const;
};

// Streaming collapse classifier for one removal window. Feed one snapshot of
// per-box motion per simulation step; the baseline is the state at
// extraction start. A box collapses when its linear or angular speed stays
// over threshold for sustain_steps consecutive steps, or when its net
// displacement at window end exceeds the displacement threshold. The driven
// box (and boxes already removed at baseline) are excluded.
class CollapseDetector {
public:
    struct BoxMotion {
        BoxId id;
        Vec3 position;
        double linear_speed = 0.0;
        double angular_speed = 0.0;
        bool excluded = false;  // driven or already removed
    };

    CollapseDetector(std::vector<BoxMotion> baseline, const CollapseThresholds& thresholds,
                     double slop);
    static CollapseDetector from_world(const World& w, const BoxId& driven,
                                       const CollapseThresholds& thresholds);

    void add_step(const std::vector<BoxMotion>& step);
    void add_step(const World& w);

    // `complete` asserts the history spans extraction start through the end
    // of the monitor window; finalizing an incomplete history throws
    // InsufficientHistory, as does finalizing with no recorded steps.
    RemovalOutcome finalize(const BoxId& removed_box, bool complete = true) const;

private:
    struct Track {
        BoxId id;
        Vec3 baseline;
        Vec3 last;
        double max_disp = 0.0;
        double end_disp = 0.0;
        int consecutive = 0;
        long crossed_at = -1;  // step index of the sustained velocity crossing
        bool excluded = false;
    };

    CollapseThresholds thresholds_;
    double slop_;
    std::vector<Track> tracks_;
    long steps_seen_ = 0;
};

// Full removal protocol, in place: settle, begin extraction, step with
// disturbance injection until the box clears, monitor, classify. The world
// keeps its post-removal state; callers wanting what-if semantics snapshot
// around the call. `sink`, when given, sees every stepped state.
RemovalOutcome run_removal(World& w, const BoxId& box, const CollapseThresholds& thresholds,
                           StepSink* sink = nullptr);

// Pure what-if on one depth sample: builds a private world, runs the
// protocol, discards the world. Deterministic given cfg.rng_seed.
RemovalOutcome simulate_removal(const SceneSample& sample, const BoxId& box,
                                const SimConfig& cfg, const CollapseThresholds& thresholds,
                                StepSink* sink = nullptr);

AggregatedOutcome aggregate(std::vector<RemovalOutcome> per_sample);

// Monte Carlo what-if across the depth-randomized samples; sample i runs on
// a world seeded with derive_seed(cfg.rng_seed, i). Samples run concurrently;
// results join in sample order. safe requires every sample SAFE.
AggregatedOutcome simulate_removal_mc(const std::vector<SceneSample>& samples, const BoxId& box,
                                      const SimConfig& cfg, const CollapseThresholds& thresholds,
                                      unsigned threads = 0);

}  // namespace shelfsim

#endif
