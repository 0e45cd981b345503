#include "shelfsim/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shelfsim/errors.hpp"
#include "shelfsim/parallel.hpp"

namespace shelfsim {

CorpusKind corpus_kind_from_string(const std::string& s) {
    if (s == "structured") return CorpusKind::STRUCTURED;
    if (s == "unstructured") return CorpusKind::UNSTRUCTURED;
    throw ParseError("unknown corpus kind: " + s);
}

const char* to_string(CorpusKind k) {
    return k == CorpusKind::STRUCTURED ? "structured" : "unstructured";
}

BenchTask bench_task_from_string(const std::string& s) {
    if (s == "extract") return BenchTask::EXTRACT_EVERY_BOX;
    if (s == "clear") return BenchTask::CLEAR;
    throw ParseError("unknown bench task: " + s);
}

const char* to_string(BenchTask t) {
    return t == BenchTask::EXTRACT_EVERY_BOX ? "extract" : "clear";
}

void CorpusSpec::validate() const {
    shelf.validate();
    if (n_scenes < 1 || boxes_min < 1 || boxes_max < boxes_min)
        throw InvalidInput("corpus ranges must be positive");
    if (box_catalog.empty()) throw InvalidInput("box catalog must not be empty");
    for (const Vec3& d : box_catalog)
        if (d.x <= 0 || d.y <= 0 || d.z <= 0)
            throw InvalidInput("catalog dimensions must be positive");
}

double efficiency_improvement(double t_bh, double t_pa) {
    if (t_pa <= 0.0) throw InvalidInput("physics-aware time must be positive");
    return 100.0 * (t_bh - t_pa) / t_pa;
}

namespace {

constexpr double kSideMargin = 0.04;   // keep boxes off the walls
constexpr double kMotifGap = 0.02;     // clearance between motifs
constexpr double kLeanEntryMinDim = 0.45;  // catalog entry usable as a leaner

RigidBox make_box(const BoxId& id, Vec3 half, Vec3 pos, double yaw = 0.0) {
    RigidBox b;
    b.id = id;
    b.half_extents = half;
    b.position = pos;
    b.yaw = yaw;
    return b;
}

// --- structured corpus -----------------------------------------------------

Scene generate_structured(const CorpusSpec& spec, Rng& rng) {
    const Shelf& shelf = spec.shelf;
    int n = spec.boxes_min +
            static_cast<int>(rng.uniform_index(
                static_cast<std::uint64_t>(spec.boxes_max - spec.boxes_min + 1)));
    const int max_layers = 3;
    int columns = (n + max_layers - 1) / max_layers;

    double usable = shelf.width - 2 * kSideMargin - (columns - 1) * kMotifGap;
    double budget = usable / columns;

    // one catalog entry per column, upright, chosen to fit the width budget
    std::vector<Vec3> column_dims(static_cast<std::size_t>(columns));
    for (auto& dims : column_dims) {
        std::vector<Vec3> fitting;
        for (const Vec3& d : spec.box_catalog)
            if (d.x <= budget && d.z <= shelf.depth) fitting.push_back(d);
        if (fitting.empty())
            throw SceneGenerationFailed("no catalog entry fits the column budget");
        dims = fitting[rng.uniform_index(fitting.size())];
    }

    // distribute boxes over columns as evenly as possible
    std::vector<int> layers(static_cast<std::size_t>(columns), 0);
    for (int i = 0; i < n; ++i) layers[static_cast<std::size_t>(i % columns)]++;

    Scene scene;
    scene.shelf = shelf;
    double x = kSideMargin;
    int id = 0;
    for (int c = 0; c < columns; ++c) {
        const Vec3& dims = column_dims[static_cast<std::size_t>(c)];
        double cx = x + dims.x / 2;
        double y = 0.0;
        for (int l = 0; l < layers[static_cast<std::size_t>(c)]; ++l) {
            // the depth offsets stay small enough that every box keeps its
            // centroid well inside the support below it
            double max_off = std::min(0.25 * dims.z, shelf.depth - dims.z);
            double z_front = max_off > 0 ? rng.uniform(0.0, max_off) : 0.0;
            scene.boxes.push_back(make_box(
                "b" + std::to_string(id++), {dims.x / 2, dims.y / 2, dims.z / 2},
                {cx, y + dims.y / 2, z_front + dims.z / 2}));
            y += dims.y;
        }
        x += dims.x + kMotifGap;
    }
    scene.validate();
    return scene;
}

// --- unstructured corpus ---------------------------------------------------

struct Interval {
    double lo, hi;
};

// Candidate placement of one motif: new boxes plus the x-interval they claim.
struct Motif {
    std::vector<RigidBox> boxes;
    Interval span;
};

// Tall box leaning on a two-cube stack; removing the buttress top drops it.
std::optional<Motif> make_leaner(const CorpusSpec& spec, Rng& rng, int* next_id,
                                 double x_lo, double x_hi) {
    const Vec3* lean_entry = nullptr;
    const Vec3* cube_entry = nullptr;
    for (const Vec3& d : spec.box_catalog) {
        double mx = std::max({d.x, d.y, d.z});
        double mn = std::min({d.x, d.y, d.z});
        if (mx >= kLeanEntryMinDim && !lean_entry) lean_entry = &d;
        if (mx - mn < 1e-9 && !cube_entry) cube_entry = &d;
    }
    if (!lean_entry || !cube_entry) return std::nullopt;

    const double cube = cube_entry->x;
    double long_dim = std::max({lean_entry->x, lean_entry->y, lean_entry->z});
    double short_a = std::min({lean_entry->x, lean_entry->y, lean_entry->z});
    const double a = short_a / 2, b = long_dim / 2;
    const double theta = rng.uniform(0.37, 0.47);  // 21..27 degrees
    const double s = std::sin(theta), c = std::cos(theta);
    const int dir = rng.next_double() < 0.5 ? 1 : -1;

    // contact at the upper inner corner of the stack's top cube
    double contact_y = 2.0 * cube;
    double cy = a * s + b * c;
    double t_c = (contact_y - cy + a * s) / c;
    if (t_c < -b * 0.5 || t_c > b * 0.95) return std::nullopt;
    double lean_offset = a * c + t_c * s;  // centroid to contact face, along x

    double reach_low = a * c + b * s;  // widest horizontal half-extent
    double width = reach_low + lean_offset + cube;
    if (width > x_hi - x_lo) return std::nullopt;

    double slack = (x_hi - x_lo) - width;
    double base = x_lo + rng.uniform(0.0, std::min(slack, 0.08));

    // place for dir = +1 (stack on the right), mirror afterwards if needed
    double face_x = base + reach_low + lean_offset;
    double stack_x = face_x + cube / 2;
    double lean_x = face_x - lean_offset;

    double depth = std::max(cube, 2 * a);
    double z_front = rng.uniform(0.0, spec.shelf.depth - depth);

    auto mirror = [&](double x) { return dir == 1 ? x : x_lo + x_hi - x; };

    Motif m;
    int id0 = (*next_id)++;
    int id1 = (*next_id)++;
    int id2 = (*next_id)++;
    m.boxes.push_back(make_box("b" + std::to_string(id0), {cube / 2, cube / 2, cube / 2},
                               {mirror(stack_x), cube / 2, z_front + cube / 2}));
    m.boxes.push_back(make_box("b" + std::to_string(id1), {cube / 2, cube / 2, cube / 2},
                               {mirror(stack_x), 1.5 * cube, z_front + cube / 2}));
    m.boxes.push_back(make_box("b" + std::to_string(id2), {a, b, a},
                               {mirror(lean_x), cy, z_front + a},
                               dir == 1 ? -theta : theta));
    m.span = {base, base + width};
    if (dir == -1) m.span = {x_lo + x_hi - (base + width), x_lo + x_hi - base};
    return m;
}

std::optional<Motif> make_stack(const CorpusSpec& spec, Rng& rng, int* next_id, double x_lo,
                                double x_hi, int height) {
    // upright-proportioned entries only; a lying plank is no stack base
    std::vector<Vec3> fitting;
    for (const Vec3& d : spec.box_catalog)
        if (d.x * 1.2 <= x_hi - x_lo && d.z <= spec.shelf.depth && d.x <= 1.5 * d.y)
            fitting.push_back(d);
    if (fitting.empty()) return std::nullopt;
    const Vec3& dims = fitting[rng.uniform_index(fitting.size())];
    double max_off_x = 0.2 * dims.x;
    double width = dims.x + max_off_x * (height - 1);
    if (width > x_hi - x_lo) return std::nullopt;
    double base = x_lo + rng.uniform(0.0, std::min((x_hi - x_lo) - width, 0.08));

    double z_front_base = rng.uniform(0.0, spec.shelf.depth - dims.z);
    Motif m;
    double cx = base + dims.x / 2;
    double y = 0.0;
    for (int l = 0; l < height; ++l) {
        double off = l == 0 ? 0.0 : rng.uniform(-max_off_x, max_off_x);
        double zo = l == 0 ? 0.0
                           : std::clamp(rng.uniform(-0.15, 0.15) * dims.z,
                                        -z_front_base, spec.shelf.depth - dims.z - z_front_base);
        cx = std::clamp(cx + off, x_lo + dims.x / 2, x_hi - dims.x / 2);
        m.boxes.push_back(make_box("b" + std::to_string((*next_id)++),
                                   {dims.x / 2, dims.y / 2, dims.z / 2},
                                   {cx, y + dims.y / 2, z_front_base + zo + dims.z / 2}));
        y += dims.y;
    }
    m.span = {base, base + width};
    return m;
}

std::optional<Motif> make_lone(const CorpusSpec& spec, Rng& rng, int* next_id, double x_lo,
                               double x_hi) {
    // random axis orientations of every catalog entry, filtered to the gap
    std::vector<Vec3> fitting;
    for (Vec3 d : spec.box_catalog) {
        for (int perm = 0; perm < 3; ++perm) {
            Vec3 o = d;
            if (perm == 1) std::swap(o.x, o.y);
            if (perm == 2) std::swap(o.y, o.z);
            if (o.x <= x_hi - x_lo && o.z <= spec.shelf.depth) fitting.push_back(o);
        }
    }
    if (fitting.empty()) return std::nullopt;
    Vec3 dims = fitting[rng.uniform_index(fitting.size())];
    double base = x_lo + rng.uniform(0.0, std::min((x_hi - x_lo) - dims.x, 0.08));
    double z_front = rng.uniform(0.0, spec.shelf.depth - dims.z);
    double yaw = rng.uniform(-0.12, 0.12);

    Motif m;
    m.boxes.push_back(make_box("b" + std::to_string((*next_id)++),
                               {dims.x / 2, dims.y / 2, dims.z / 2},
                               {base + dims.x / 2, dims.y / 2 + 0.002, z_front + dims.z / 2},
                               yaw));
    m.span = {base, base + dims.x};
    return m;
}

Scene generate_unstructured(const CorpusSpec& spec, Rng& rng, std::uint64_t settle_seed) {
    const Shelf& shelf = spec.shelf;
    int target_n = spec.boxes_min +
                   static_cast<int>(rng.uniform_index(
                       static_cast<std::uint64_t>(spec.boxes_max - spec.boxes_min + 1)));

    Scene scene;
    scene.shelf = shelf;
    std::vector<Interval> gaps{{kSideMargin, shelf.width - kSideMargin}};
    int next_id = 0;
    int attempts = 0;
    int leaners_placed = 0;

    SimConfig settle_cfg;
    settle_cfg.rng_seed = settle_seed;

    while (static_cast<int>(scene.boxes.size()) < target_n && attempts < 80) {
        ++attempts;
        int saved_id = next_id;
        int remaining = target_n - static_cast<int>(scene.boxes.size());
        if (gaps.empty()) break;

        // widest gaps first keeps the wide leaner motif placeable
        std::size_t gap_idx = 0;
        for (std::size_t g = 1; g < gaps.size(); ++g)
            if (gaps[g].hi - gaps[g].lo > gaps[gap_idx].hi - gaps[gap_idx].lo) gap_idx = g;
        if (rng.next_double() < 0.4) gap_idx = rng.uniform_index(gaps.size());
        const Interval gap = gaps[gap_idx];

        double roll = rng.next_double();
        std::optional<Motif> motif;
        // at most one leaning motif per scene; stacks dominate the rest
        double lean_p = leaners_placed == 0 ? 0.5 : 0.0;
        bool below_min = static_cast<int>(scene.boxes.size()) < spec.boxes_min;
        if (remaining >= 3 && roll < lean_p) {
            motif = make_leaner(spec, rng, &next_id, gap.lo, gap.hi);
            if (motif) ++leaners_placed;
        }
        // until the minimum count is secured, pack boxes vertically
        if (!motif && remaining >= 2 && (below_min || roll < lean_p + 0.55))
            motif = make_stack(spec, rng, &next_id, gap.lo, gap.hi,
                               remaining >= 3 && rng.next_double() < 0.35 ? 3 : 2);
        if (!motif) motif = make_lone(spec, rng, &next_id, gap.lo, gap.hi);
        if (!motif) {
            next_id = saved_id;
            continue;
        }

        Scene candidate = scene;
        candidate.boxes.insert(candidate.boxes.end(), motif->boxes.begin(),
                               motif->boxes.end());
        try {
            candidate.validate_structure();
            World w(candidate, settle_cfg);
            auto disp = w.settle(0.8);
            bool ok = true;
            for (const RigidBox& old_box : scene.boxes)
                if (disp.at(old_box.id) > 0.005) ok = false;
            for (const RigidBox& nb : motif->boxes)
                if (disp.at(nb.id) > 0.15) ok = false;
            if (!ok) {
                next_id = saved_id;
                continue;
            }
            Scene settled = w.to_scene(0.04);
            for (RigidBox& b : settled.boxes) {
                b.linear_velocity = {};
                b.angular_velocity = {};
            }
            settled.validate();
            scene = std::move(settled);

            // split the gap around the claimed span
            gaps.erase(gaps.begin() + static_cast<long>(gap_idx));
            if (motif->span.lo - kMotifGap - gap.lo > 0.01)
                gaps.push_back({gap.lo, motif->span.lo - kMotifGap});
            if (gap.hi - (motif->span.hi + kMotifGap) > 0.01)
                gaps.push_back({motif->span.hi + kMotifGap, gap.hi});
        } catch (const Error&) {
            next_id = saved_id;
            continue;
        }
    }

    if (static_cast<int>(scene.boxes.size()) < spec.boxes_min)
        throw SceneGenerationFailed("could not place the requested boxes");
    return scene;
}

}  // namespace

GeneratedScene generate_scene(const CorpusSpec& spec, int index) {
    spec.validate();
    if (index < 0 || index >= spec.n_scenes) throw InvalidInput("scene index out of range");
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));

    GeneratedScene out;
    out.scene = spec.kind == CorpusKind::STRUCTURED
                    ? generate_structured(spec, rng)
                    : generate_unstructured(spec, rng,
                                            derive_seed(spec.seed, 0x5e771eull + index));
    out.observation = observe_scene(out.scene);
    return out;
}

// --- curated scenes ----------------------------------------------------------

Scene structured_demo_scene() {
    Scene s;
    const double h = 0.1;
    auto column = [&](const std::string& prefix, double x) {
        for (int i = 0; i < 3; ++i)
            s.boxes.push_back(make_box(prefix + std::to_string(i + 1), {h, h, h},
                                       {x, h + i * 2 * h, 0.15}));
    };
    column("a", 0.25);
    column("b", 0.62);
    s.validate();
    return s;
}

Scene unstructured_counterexample() {
    Scene s;
    const double cube = 0.2;
    const double a = 0.085, b = 0.25;     // tall 0.17 x 0.50 x 0.17 box
    const double theta = 24.0 * M_PI / 180.0;
    const double sn = std::sin(theta), cs = std::cos(theta);

    s.boxes.push_back(make_box("side_bottom", {0.1, 0.1, 0.1}, {0.20, 0.10, 0.15}));
    s.boxes.push_back(make_box("side_top", {0.1, 0.1, 0.1}, {0.20, 0.30, 0.15}));
    s.boxes.push_back(make_box("stack_bottom", {0.1, 0.1, 0.1}, {0.75, 0.10, 0.15}));
    s.boxes.push_back(make_box("stack_top", {0.1, 0.1, 0.1}, {0.75, 0.30, 0.15}));

    // tall box leaning on stack_top's upper-left corner
    double cy = a * sn + b * cs;
    double t_c = (2.0 * cube - cy + a * sn) / cs;
    double face_x = 0.75 - cube / 2;
    double cx = face_x - (a * cs + t_c * sn);
    s.boxes.push_back(make_box("tall_lean", {a, b, a}, {cx, cy, 0.15}, -theta));
    s.validate();
    return s;
}

Scene dependency_chain_scene() {
    Scene s;
    const double h = 0.1;
    for (int i = 0; i < 3; ++i)
        s.boxes.push_back(
            make_box("chain_" + std::to_string(i), {h, h, h}, {0.5, h + i * 2 * h, 0.15}));
    s.validate();
    return s;
}

// --- benchmark ---------------------------------------------------------------

namespace {

BenchRow plan_and_validate(int scene_id, const GeneratedScene& g, const BoxId& target,
                           Approach approach, BenchTask task, const SimConfig& cfg,
                           const CollapseThresholds& thresholds, const BenchOptions& opts,
                           unsigned inner_threads) {
    BenchRow row;
    row.scene_id = scene_id;
    row.target = target;
    row.approach = approach;

    ActionPlan plan;
    bool planned = false;
    try {
        if (approach == Approach::PHYSICS) {
            PlannerOptions popts;
            popts.k = opts.k;
            popts.threads = inner_threads;
            plan = task == BenchTask::EXTRACT_EVERY_BOX
                       ? plan_extraction_physics(g.observation, target, cfg, thresholds, popts)
                       : plan_clearance_physics(g.observation, cfg, thresholds, popts);
        } else {
            plan = task == BenchTask::EXTRACT_EVERY_BOX
                       ? plan_extraction_heuristic(g.observation, target)
                       : plan_clearance_heuristic(g.observation);
        }
        planned = true;
    } catch (const UnclearableResidue& e) {
        // execute the safe prefix; the task still counts as failed
        plan.approach = approach;
        for (const BoxId& id : e.partial_plan)
            plan.actions.push_back({id, std::nullopt, std::nullopt});
        row.error = "unclearable_residue";
    } catch (const Error& e) {
        row.error = e.what();
    }

    row.planning_time_s = plan.stats.planning_time_s;
    row.sims_run = plan.stats.simulations_run;

    if (planned || !plan.actions.empty()) {
        ExecutionReport rep = validate_plan(g.scene, plan, cfg, thresholds);
        row.boxes_removed = rep.boxes_removed;
        row.est_time_s = rep.estimated_time;
        row.success = planned && rep.success;
    }
    return row;
}

ApproachSummary summarize(const std::vector<BenchRow>& rows, Approach approach) {
    ApproachSummary s;
    for (const BenchRow& r : rows) {
        if (r.approach != approach) continue;
        ++s.runs;
        s.avg_boxes_removed += r.boxes_removed;
        s.avg_est_time_s += r.est_time_s;
        s.success_rate += r.success ? 1.0 : 0.0;
    }
    if (s.runs > 0) {
        s.avg_boxes_removed /= s.runs;
        s.avg_est_time_s /= s.runs;
        s.success_rate /= s.runs;
    }
    return s;
}

}  // namespace

BenchReport run_benchmark(const CorpusSpec& corpus, BenchTask task, const SimConfig& cfg,
                          const CollapseThresholds& thresholds, const BenchOptions& opts) {
    corpus.validate();
    cfg.validate();
    thresholds.validate();

    std::vector<std::vector<BenchRow>> per_scene(static_cast<std::size_t>(corpus.n_scenes));
    std::vector<std::string> scene_errors(static_cast<std::size_t>(corpus.n_scenes));
    unsigned hw = std::thread::hardware_concurrency();
    unsigned scene_workers = opts.threads ? opts.threads : (hw ? hw : 1);
    // scenes fan out; the per-attempt sample simulations stay serial inside
    unsigned inner_threads = 1;

    parallel_for(
        static_cast<std::size_t>(corpus.n_scenes),
        [&](std::size_t i) {
            auto scene_id = static_cast<int>(i);
            std::vector<BenchRow>& rows = per_scene[i];
            GeneratedScene g;
            try {
                g = generate_scene(corpus, scene_id);
            } catch (const Error& e) {
                scene_errors[i] = "scene " + std::to_string(scene_id) +
                                  " generation failed: " + e.what();
                return;
            }
            SimConfig scene_cfg = cfg;
            scene_cfg.rng_seed = derive_seed(cfg.rng_seed, 0xbe7cull + i);

            if (task == BenchTask::EXTRACT_EVERY_BOX) {
                for (const BoxObservation& b : g.observation.boxes) {
                    rows.push_back(plan_and_validate(scene_id, g, b.id, Approach::PHYSICS, task,
                                                     scene_cfg, thresholds, opts, inner_threads));
                    rows.push_back(plan_and_validate(scene_id, g, b.id, Approach::HEURISTIC,
                                                     task, scene_cfg, thresholds, opts,
                                                     inner_threads));
                }
            } else {
                rows.push_back(plan_and_validate(scene_id, g, BoxId{}, Approach::PHYSICS, task,
                                                 scene_cfg, thresholds, opts, inner_threads));
                rows.push_back(plan_and_validate(scene_id, g, BoxId{}, Approach::HEURISTIC, task,
                                                 scene_cfg, thresholds, opts, inner_threads));
            }
        },
        scene_workers);

    BenchReport report;
    for (auto& rows : per_scene)
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    for (const std::string& err : scene_errors)
        if (!err.empty()) report.errors.push_back(err);

    report.physics = summarize(report.rows, Approach::PHYSICS);
    report.heuristic = summarize(report.rows, Approach::HEURISTIC);
    report.success_rate_delta_pp =
        100.0 * (report.physics.success_rate - report.heuristic.success_rate);
    if (report.physics.avg_est_time_s > 0.0)
        report.efficiency_improvement_pct =
            efficiency_improvement(report.heuristic.avg_est_time_s, report.physics.avg_est_time_s);
    return report;
}

std::string to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "scene_id,target_id,approach,success,boxes_removed,est_time_s,"
                      "planning_time_s,sims_run\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%s,%d,%d,%.3f,%.3f,%llu\n", r.scene_id,
                      r.target.c_str(), to_string(r.approach), r.success ? 1 : 0,
                      r.boxes_removed, r.est_time_s, r.planning_time_s,
                      static_cast<unsigned long long>(r.sims_run));
        out += buf;
    }
    return out;
}

}  // namespace shelfsim
