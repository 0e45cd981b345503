#include "shelfsim/collapse.hpp"

#include <algorithm>
#include <cmath>

#include "shelfsim/errors.hpp"
#include "shelfsim/parallel.hpp"

namespace shelfsim {

void CollapseThresholds::validate() const {
    if (linear_speed <= 0 || angular_speed <= 0 || displacement <= 0 || sustain_steps <= 0)
        throw InvalidInput("collapse thresholds must be positive");
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::SAFE: return "SAFE";
        case Classification::MINOR_SHIFT: return "MINOR_SHIFT";
        case Classification::COLLAPSE: return "COLLAPSE";
    }
    return "?";
}

Classification classification_from_string(const std::string& s) {
    if (s == "SAFE") return Classification::SAFE;
    if (s == "MINOR_SHIFT") return Classification::MINOR_SHIFT;
    if (s == "COLLAPSE") return Classification::COLLAPSE;
    throw ParseError("unknown classification: " + s);
}

bool AggregatedOutcome::any_collapse() const {
    return std::any_of(per_sample.begin(), per_sample.end(), [](const RemovalOutcome& o) {
        return o.classification == Classification::COLLAPSE;
    });
}

CollapseDetector::CollapseDetector(std::vector<BoxMotion> baseline,
                                   const CollapseThresholds& thresholds, double slop)
    : thresholds_(thresholds), slop_(slop) {
    thresholds_.validate();
    tracks_.reserve(baseline.size());
    for (const BoxMotion& m : baseline) {
        Track t;
        t.id = m.id;
        t.baseline = m.position;
        t.last = m.position;
        t.excluded = m.excluded;
        tracks_.push_back(std::move(t));
    }
}

namespace {

std::vector<CollapseDetector::BoxMotion> motions_from_world(const World& w, const BoxId& driven) {
    std::vector<CollapseDetector::BoxMotion> out;
    out.reserve(w.box_count());
    for (std::size_t i = 0; i < w.box_count(); ++i) {
        const Body& b = w.body(i);
        out.push_back({b.id, b.position, length(b.linear_velocity), length(b.angular_velocity),
                       b.removed || b.driven || b.id == driven});
    }
    return out;
}

}  // namespace

CollapseDetector CollapseDetector::from_world(const World& w, const BoxId& driven,
                                              const CollapseThresholds& thresholds) {
    return CollapseDetector(motions_from_world(w, driven), thresholds,
                            w.config().contact_slop);
}

void CollapseDetector::add_step(const std::vector<BoxMotion>& step) {
    if (step.size() != tracks_.size())
        throw InvalidInput("motion snapshot does not match the baseline box set");
    ++steps_seen_;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& t = tracks_[i];
        const BoxMotion& m = step[i];
        if (t.id != m.id) throw InvalidInput("motion snapshot order changed mid-window");
        if (t.excluded || m.excluded) continue;
        t.last = m.position;
        double disp = length(m.position - t.baseline);
        t.end_disp = disp;
        t.max_disp = std::max(t.max_disp, disp);
        if (m.linear_speed > thresholds_.linear_speed ||
            m.angular_speed > thresholds_.angular_speed) {
            ++t.consecutive;
            if (t.consecutive >= thresholds_.sustain_steps && t.crossed_at < 0)
                t.crossed_at = steps_seen_;
        } else {
            t.consecutive = 0;
        }
    }
}

void CollapseDetector::add_step(const World& w) {
    // the driven/removed flags on the bodies already mark exclusions; pass
    // an empty driven id so only those flags apply
    auto step = motions_from_world(w, BoxId{});
    // keep the baseline exclusion set authoritative
    for (std::size_t i = 0; i < step.size() && i < tracks_.size(); ++i)
        step[i].excluded = step[i].excluded || tracks_[i].excluded;
    add_step(step);
}

RemovalOutcome CollapseDetector::finalize(const BoxId& removed_box, bool complete) const {
    if (!complete || steps_seen_ == 0)
        throw InsufficientHistory("removal window history is incomplete");

    RemovalOutcome out;
    out.removed = removed_box;

    struct Crossing {
        long step;
        std::size_t order;
        BoxId id;
    };
    std::vector<Crossing> crossings;
    bool any_minor = false;

    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        const Track& t = tracks_[i];
        if (t.excluded) continue;
        out.max_displacement[t.id] = t.max_disp;
        bool velocity_crossed = t.crossed_at >= 0;
        bool displaced = t.end_disp > thresholds_.displacement;
        if (velocity_crossed || displaced) {
            // displacement-only crossings count at window end
            crossings.push_back({velocity_crossed ? t.crossed_at : steps_seen_ + 1, i, t.id});
        } else if (t.end_disp > slop_) {
            any_minor = true;
        }
    }

    std::sort(crossings.begin(), crossings.end(), [](const Crossing& a, const Crossing& b) {
        return a.step != b.step ? a.step < b.step : a.order < b.order;
    });
    for (const Crossing& c : crossings) out.collapsed_boxes.push_back(c.id);

    if (!out.collapsed_boxes.empty()) {
        out.classification = Classification::COLLAPSE;
        out.first_collapsed = out.collapsed_boxes.front();
    } else if (any_minor) {
        out.classification = Classification::MINOR_SHIFT;
    } else {
        out.classification = Classification::SAFE;
    }
    return out;
}

RemovalOutcome run_removal(World& w, const BoxId& box, const CollapseThresholds& thresholds,
                           StepSink* sink) {
    const SimConfig& cfg = w.config();

    auto settle_steps = static_cast<long>(std::ceil(cfg.settle_time / cfg.timestep));
    for (long i = 0; i < settle_steps; ++i) {
        w.step();
        if (sink) sink->on_step(w);
    }

    w.begin_extraction(box);
    CollapseDetector detector = CollapseDetector::from_world(w, box, thresholds);

    // the pull can never need more than the full shelf depth plus one box
    auto max_pull_steps = static_cast<long>(
        std::ceil(2.0 * (w.shelf().depth + 1.0) / cfg.extraction_speed / cfg.timestep));
    long pulled = 0;
    while (w.extraction_active()) {
        if (++pulled > max_pull_steps)
            throw SimulationExploded("extraction of " + box + " failed to clear the shelf");
        w.inject_disturbance();
        w.step();
        detector.add_step(w);
        if (sink) sink->on_step(w);
    }

    auto monitor_steps = static_cast<long>(std::ceil(cfg.monitor_time / cfg.timestep));
    for (long i = 0; i < monitor_steps; ++i) {
        w.step();
        detector.add_step(w);
        if (sink) sink->on_step(w);
    }

    return detector.finalize(box);
}

RemovalOutcome simulate_removal(const SceneSample& sample, const BoxId& box,
                                const SimConfig& cfg, const CollapseThresholds& thresholds,
                                StepSink* sink) {
    if (!sample.scene.find(box)) throw UnknownBox(box);
    World w(sample.scene, cfg);
    return run_removal(w, box, thresholds, sink);
}

AggregatedOutcome aggregate(std::vector<RemovalOutcome> per_sample) {
    AggregatedOutcome agg;
    agg.per_sample = std::move(per_sample);
    std::vector<BoxId> mode_order;
    std::map<BoxId, int> counts;
    for (const RemovalOutcome& o : agg.per_sample) {
        if (o.classification != Classification::SAFE) agg.safe = false;
        if (o.classification == Classification::COLLAPSE) {
            for (const BoxId& id : o.collapsed_boxes) agg.collapse_union.insert(id);
            if (o.first_collapsed) {
                if (counts.emplace(*o.first_collapsed, 0).second)
                    mode_order.push_back(*o.first_collapsed);
                ++counts[*o.first_collapsed];
            }
        }
    }
    int best = 0;
    for (const BoxId& id : mode_order) {  // ties resolve to earliest appearance
        if (counts[id] > best) {
            best = counts[id];
            agg.first_collapsed_mode = id;
        }
    }
    return agg;
}

AggregatedOutcome simulate_removal_mc(const std::vector<SceneSample>& samples, const BoxId& box,
                                      const SimConfig& cfg, const CollapseThresholds& thresholds,
                                      unsigned threads) {
    if (samples.empty()) throw InvalidInput("no samples to simulate");
    std::vector<RemovalOutcome> outcomes(samples.size());
    parallel_for(
        samples.size(),
        [&](std::size_t i) {
            SimConfig sample_cfg = cfg;
            sample_cfg.rng_seed = derive_seed(cfg.rng_seed, i);
            try {
                outcomes[i] = simulate_removal(samples[i], box, sample_cfg, thresholds);
            } catch (const Error& e) {
                throw Error("sample " + std::to_string(i) + ": " + e.what());
            }
        },
        threads);
    return aggregate(std::move(outcomes));
}

}  // namespace shelfsim
