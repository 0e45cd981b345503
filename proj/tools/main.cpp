#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shelfsim/bench.hpp"
#include "shelfsim/errors.hpp"
#include "shelfsim/json_io.hpp"
#include "shelfsim/render.hpp"

using namespace shelfsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPlanningFailure = 3;

namespace fs = std::filesystem;

struct CommonConfig {
    std::string config_path;
    std::string thresholds_path;
    std::optional<std::uint64_t> seed;

    SimConfig sim() const {
        SimConfig cfg;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("SHELFSIM_CONFIG")) path = env;
        }
        if (!path.empty()) cfg = sim_config_from_json(load_json_file(path));
        if (seed) cfg.rng_seed = *seed;
        cfg.validate();
        return cfg;
    }

    CollapseThresholds thresholds() const {
        CollapseThresholds thr;
        if (!thresholds_path.empty())
            thr = thresholds_from_json(load_json_file(thresholds_path));
        thr.validate();
        return thr;
    }
};

void add_common(CLI::App* cmd, CommonConfig& common) {
    cmd->add_option("--config", common.config_path,
                    "simulation config JSON (default: $SHELFSIM_CONFIG)");
    cmd->add_option("--thresholds", common.thresholds_path, "collapse thresholds JSON");
    cmd->add_option("--seed", common.seed, "override the config rng_seed");
}

std::pair<int, int> parse_box_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        int n = std::stoi(text);
        return {n, n};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
}

double wall_seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& kind, int scenes, const std::string& boxes,
            std::uint64_t seed, const std::string& out_dir) {
    CorpusSpec spec;
    spec.kind = corpus_kind_from_string(kind);
    spec.n_scenes = scenes;
    std::tie(spec.boxes_min, spec.boxes_max) = parse_box_range(boxes);
    spec.seed = seed;
    spec.validate();

    fs::create_directories(out_dir);
    for (int i = 0; i < scenes; ++i) {
        GeneratedScene g = generate_scene(spec, i);
        char scene_name[64], obs_name[64];
        std::snprintf(scene_name, sizeof(scene_name), "scene_%03d.json", i);
        std::snprintf(obs_name, sizeof(obs_name), "obs_%03d.json", i);
        save_json_file((fs::path(out_dir) / scene_name).string(), scene_to_json(g.scene));
        save_json_file((fs::path(out_dir) / obs_name).string(),
                       observation_to_json(g.observation));
    }
    std::cout << "wrote " << scenes << " scene/observation pair(s) to " << out_dir << "\n";
    return kExitOk;
}

int cmd_plan(const CommonConfig& common, const std::string& obs_path, const std::string& task,
             const std::string& target, const std::string& approach, int k,
             const std::string& out_path) {
    if ((task == "extract") != !target.empty())
        throw InvalidInput("--target is required for --task extract and forbidden for clear");

    ObservationSet obs = observation_from_json(load_json_file(obs_path));
    SimConfig cfg = common.sim();
    CollapseThresholds thr = common.thresholds();
    PlannerOptions opts;
    opts.k = k;

    auto start = std::chrono::steady_clock::now();
    ActionPlan plan;
    if (approach == "physics") {
        plan = task == "extract" ? plan_extraction_physics(obs, target, cfg, thr, opts)
                                 : plan_clearance_physics(obs, cfg, thr, opts);
    } else if (approach == "heuristic") {
        plan = task == "extract" ? plan_extraction_heuristic(obs, target)
                                 : plan_clearance_heuristic(obs);
    } else {
        throw InvalidInput("approach must be physics or heuristic");
    }
    double wall = wall_seconds(start);

    if (!out_path.empty()) save_json_file(out_path, plan_to_json(plan));

    std::cout << "plan (" << approach << ", " << task << "):\n";
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        const PlannedAction& a = plan.actions[i];
        std::cout << "  " << i + 1 << ". remove " << a.box;
        if (a.predicted_safe) std::cout << (*a.predicted_safe ? "  [predicted safe]"
                                                              : "  [predicted shaky]");
        std::cout << "\n";
    }
    std::printf("simulations run: %llu\n",
                static_cast<unsigned long long>(plan.stats.simulations_run));
    std::printf("simulated planning time: %.2f s\n", plan.stats.planning_time_s);
    std::printf("wall time: %.2f s\n", wall);
    return kExitOk;
}

int cmd_simulate(const CommonConfig& common, const std::string& scene_path,
                 const std::string& obs_path, const std::string& box, int k,
                 const std::string& traj_path, const std::string& out_path) {
    if (scene_path.empty() == obs_path.empty())
        throw InvalidInput("exactly one of --scene or --obs is required");
    SimConfig cfg = common.sim();
    CollapseThresholds thr = common.thresholds();

    Json result;
    if (!scene_path.empty()) {
        Scene scene = scene_from_json(load_json_file(scene_path));
        SceneSample sample;
        sample.scene = scene;
        std::ofstream traj_file;
        std::optional<TrajectoryWriter> writer;
        if (!traj_path.empty()) {
            traj_file.open(traj_path, std::ios::binary);
            if (!traj_file) throw Error("cannot write " + traj_path);
            writer.emplace(traj_file);
        }
        RemovalOutcome outcome =
            simulate_removal(sample, box, cfg, thr, writer ? &*writer : nullptr);
        result = outcome_to_json(outcome);
    } else {
        ObservationSet obs = observation_from_json(load_json_file(obs_path));
        auto samples = sample_batch(obs, cfg, cfg.rng_seed, k);
        AggregatedOutcome outcome = simulate_removal_mc(samples, box, cfg, thr);
        result = aggregated_to_json(outcome);
    }

    if (!out_path.empty()) save_json_file(out_path, result);
    std::cout << result.dump(2) << "\n";
    return kExitOk;
}

int cmd_validate(const CommonConfig& common, const std::string& scene_path,
                 const std::string& plan_path, const std::string& out_path,
                 const std::string& traj_path) {
    Scene scene = scene_from_json(load_json_file(scene_path));
    ActionPlan plan = plan_from_json(load_json_file(plan_path));
    SimConfig cfg = common.sim();
    CollapseThresholds thr = common.thresholds();

    std::ofstream traj_file;
    std::optional<TrajectoryWriter> writer;
    if (!traj_path.empty()) {
        traj_file.open(traj_path, std::ios::binary);
        if (!traj_file) throw Error("cannot write " + traj_path);
        writer.emplace(traj_file);
    }

    ExecutionReport report = validate_plan(scene, plan, cfg, thr, writer ? &*writer : nullptr);
    Json j = report_to_json(report);
    if (!out_path.empty()) save_json_file(out_path, j);
    std::cout << j.dump(2) << "\n";
    return report.success ? kExitOk : kExitValidationFailure;
}

int cmd_bench(const CommonConfig& common, const std::string& kind, int scenes,
              const std::string& boxes, std::uint64_t corpus_seed, const std::string& task,
              int k, unsigned threads, const std::string& out_dir) {
    CorpusSpec spec;
    spec.kind = corpus_kind_from_string(kind);
    spec.n_scenes = scenes;
    std::tie(spec.boxes_min, spec.boxes_max) = parse_box_range(boxes);
    spec.seed = corpus_seed;

    BenchTask bench_task = bench_task_from_string(task);
    SimConfig cfg = common.sim();
    CollapseThresholds thr = common.thresholds();
    BenchOptions opts;
    opts.k = k;
    opts.threads = threads;

    auto start = std::chrono::steady_clock::now();
    BenchReport report = run_benchmark(spec, bench_task, cfg, thr, opts);

    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "bench.csv").string(), to_csv(report.rows));
    save_json_file((fs::path(out_dir) / "summary.json").string(),
                   bench_report_to_json(report, bench_task));

    std::printf("physics:   success %.1f%%  avg boxes %.2f  avg time %.1f s  (%d runs)\n",
                100.0 * report.physics.success_rate, report.physics.avg_boxes_removed,
                report.physics.avg_est_time_s, report.physics.runs);
    std::printf("heuristic: success %.1f%%  avg boxes %.2f  avg time %.1f s  (%d runs)\n",
                100.0 * report.heuristic.success_rate, report.heuristic.avg_boxes_removed,
                report.heuristic.avg_est_time_s, report.heuristic.runs);
    std::printf("success delta: %+.1f pp\n", report.success_rate_delta_pp);
    if (report.efficiency_improvement_pct)
        std::printf("efficiency improvement: %+.2f%%\n", *report.efficiency_improvement_pct);
    std::printf("wall time: %.1f s\n", wall_seconds(start));
    return kExitOk;
}

int cmd_render(const std::string& traj_path, const std::string& out_dir,
               const std::string& view, int frame_stride, double highlight) {
    RenderSpec spec;
    spec.view = render_view_from_string(view);
    spec.frame_stride = frame_stride;
    spec.highlight_threshold = highlight;
    spec.output_dir = out_dir;
    int frames = render_trajectory(traj_path, spec);
    std::cout << "wrote " << frames << " frame(s) to " << out_dir << "\n";
    return kExitOk;
}

int cmd_check(const std::string& path, const std::string& schema) {
    std::string kind = check_document(load_json_file(path), schema);
    std::cout << path << ": valid " << kind << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic shelf-stack simulation and extraction planning"};
    app.require_subcommand(1);

    CommonConfig common;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a scene corpus");
    std::string gen_kind = "structured", gen_boxes = "4:8", gen_out = ".";
    int gen_scenes = 1;
    std::uint64_t gen_seed = 0;
    gen->add_option("--kind", gen_kind, "structured|unstructured");
    gen->add_option("--scenes", gen_scenes, "number of scenes");
    gen->add_option("--boxes", gen_boxes, "boxes per scene, N or MIN:MAX");
    gen->add_option("--seed", gen_seed, "corpus seed");
    gen->add_option("--out", gen_out, "output directory");

    // plan
    auto* plan = app.add_subcommand("plan", "plan an extraction or clearance");
    std::string plan_obs, plan_task = "extract", plan_target, plan_approach = "physics",
                plan_out;
    int plan_k = 10;
    plan->add_option("--obs", plan_obs, "observation JSON")->required();
    plan->add_option("--task", plan_task, "extract|clear");
    plan->add_option("--target", plan_target, "target box id (extract)");
    plan->add_option("--approach", plan_approach, "physics|heuristic");
    plan->add_option("--k", plan_k, "depth samples per attempt");
    plan->add_option("--out", plan_out, "plan JSON output path");
    add_common(plan, common);

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate one removal");
    std::string sim_scene, sim_obs, sim_box, sim_traj, sim_out;
    int sim_k = 10;
    sim->add_option("--scene", sim_scene, "ground-truth scene JSON");
    sim->add_option("--obs", sim_obs, "observation JSON (Monte Carlo over K samples)");
    sim->add_option("--box", sim_box, "box to remove")->required();
    sim->add_option("--k", sim_k, "samples for --obs mode");
    sim->add_option("--traj", sim_traj, "write a per-step trajectory dump (scene mode)");
    sim->add_option("--out", sim_out, "outcome JSON output path");
    add_common(sim, common);

    // validate
    auto* val = app.add_subcommand("validate", "execute a plan against ground truth");
    std::string val_scene, val_plan, val_out, val_traj;
    val->add_option("--scene", val_scene, "ground-truth scene JSON")->required();
    val->add_option("--plan", val_plan, "plan JSON")->required();
    val->add_option("--out", val_out, "report JSON output path");
    val->add_option("--traj", val_traj, "write a per-step trajectory dump");
    add_common(val, common);

    // bench
    auto* bench = app.add_subcommand("bench", "run the head-to-head benchmark");
    std::string bench_kind = "unstructured", bench_boxes = "4:8", bench_task = "extract",
                bench_out = "bench_out";
    int bench_scenes = 10, bench_k = 10;
    unsigned bench_threads = 0;
    std::uint64_t bench_seed = 0;
    bench->add_option("--kind", bench_kind, "structured|unstructured");
    bench->add_option("--scenes", bench_scenes, "number of scenes");
    bench->add_option("--boxes", bench_boxes, "boxes per scene, N or MIN:MAX");
    bench->add_option("--corpus-seed", bench_seed, "corpus seed");
    bench->add_option("--task", bench_task, "extract|clear");
    bench->add_option("--k", bench_k, "depth samples per attempt");
    bench->add_option("--threads", bench_threads, "worker threads (0 = auto)");
    bench->add_option("--out-dir", bench_out, "output directory for CSV + summary");
    add_common(bench, common);

    // render
    auto* render = app.add_subcommand("render", "render SVG frames from a trajectory dump");
    std::string render_traj, render_out = "frames", render_view = "front";
    int render_stride = 8;
    double render_highlight = 0.02;
    render->add_option("--traj", render_traj, "trajectory dump (JSON lines)")->required();
    render->add_option("--out", render_out, "output directory");
    render->add_option("--view", render_view, "front|top");
    render->add_option("--frame-stride", render_stride, "steps per frame");
    render->add_option("--highlight-threshold", render_highlight,
                       "displacement that highlights a box, m");

    // check
    auto* check = app.add_subcommand("check", "validate a JSON file against its schema");
    std::string check_path, check_schema;
    check->add_option("--file", check_path, "file to check")->required();
    check->add_option("--schema", check_schema,
                      "scene|observation|plan|report|outcome|config|thresholds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_kind, gen_scenes, gen_boxes, gen_seed, gen_out);
        if (plan->parsed())
            return cmd_plan(common, plan_obs, plan_task, plan_target, plan_approach, plan_k,
                            plan_out);
        if (sim->parsed())
            return cmd_simulate(common, sim_scene, sim_obs, sim_box, sim_k, sim_traj, sim_out);
        if (val->parsed()) return cmd_validate(common, val_scene, val_plan, val_out, val_traj);
        if (bench->parsed())
            return cmd_bench(common, bench_kind, bench_scenes, bench_boxes, bench_seed,
                             bench_task, bench_k, bench_threads, bench_out);
        if (render->parsed())
            return cmd_render(render_traj, render_out, render_view, render_stride,
                              render_highlight);
        if (check->parsed()) return cmd_check(check_path, check_schema);
    } catch (const PlanNotFound& e) {
        std::cerr << "planning failed: " << e.what() << "\n";
        for (const std::string& line : e.trace) std::cerr << "  " << line << "\n";
        return kExitPlanningFailure;
    } catch (const UnclearableResidue& e) {
        std::cerr << "planning failed: " << e.what() << "\n";
        std::cerr << "  remaining:";
        for (const BoxId& id : e.remaining) std::cerr << " " << id;
        std::cerr << "\n";
        return kExitPlanningFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
