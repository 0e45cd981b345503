#include "shelfsim/json_io.hpp"

#include <fstream>
#include <set>

#include "shelfsim/errors.hpp"

namespace shelfsim {

namespace {

Json vec3_to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }
Json vec2_to_json(const Vec2& v) { return Json::array({v.x, v.y}); }

Vec3 vec3_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw ParseError(std::string(what) + " must be [x,y,z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec2 vec2_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ParseError(std::string(what) + " must be [x,y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

void require_version(const Json& j) {
    if (!j.contains("schema_version")) throw ParseError("missing schema_version");
    if (j["schema_version"].get<int>() != kSchemaVersion)
        throw ParseError("unsupported schema_version");
}

Json shelf_to_json(const Shelf& s) {
    return Json{{"width", s.width},
                {"height", s.height},
                {"depth", s.depth},
                {"wall_thickness", s.wall_thickness},
                {"has_side_walls", s.has_side_walls}};
}

Shelf shelf_from_json(const Json& j) {
    Shelf s;
    if (!j.is_object()) throw ParseError("shelf must be an object");
    s.width = j.at("width").get<double>();
    s.height = j.at("height").get<double>();
    s.depth = j.at("depth").get<double>();
    if (j.contains("wall_thickness")) s.wall_thickness = j["wall_thickness"].get<double>();
    if (j.contains("has_side_walls")) s.has_side_walls = j["has_side_walls"].get<bool>();
    return s;
}

}  // namespace

Json scene_to_json(const Scene& scene) {
    Json boxes = Json::array();
    for (const RigidBox& b : scene.boxes) {
        if (b.removed) continue;
        boxes.push_back(Json{{"id", b.id},
                             {"half_extents", vec3_to_json(b.half_extents)},
                             {"position", vec3_to_json(b.position)},
                             {"yaw", b.yaw}});
    }
    return Json{{"schema_version", kSchemaVersion},
                {"shelf", shelf_to_json(scene.shelf)},
                {"boxes", boxes}};
}

Scene scene_from_json(const Json& j) {
    try {
        require_version(j);
        Scene scene;
        scene.shelf = shelf_from_json(j.at("shelf"));
        for (const Json& jb : j.at("boxes")) {
            RigidBox b;
            b.id = jb.at("id").get<std::string>();
            b.half_extents = vec3_from_json(jb.at("half_extents"), "half_extents");
            b.position = vec3_from_json(jb.at("position"), "position");
            b.yaw = jb.value("yaw", 0.0);
            scene.boxes.push_back(std::move(b));
        }
        scene.validate();
        return scene;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("scene: ") + e.what());
    }
}

Json observation_to_json(const ObservationSet& obs) {
    Json j{{"schema_version", kSchemaVersion}};
    if (obs.camera) {
        j["camera"] = Json{{"fx", obs.camera->fx},
                           {"fy", obs.camera->fy},
                           {"cx", obs.camera->cx},
                           {"cy", obs.camera->cy},
                           {"shelf_distance", obs.camera->shelf_distance}};
    }
    j["shelf"] = shelf_to_json(obs.shelf);
    Json boxes = Json::array();
    for (const BoxObservation& b : obs.boxes) {
        Json jb{{"id", b.id}};
        if (b.metric) {
            jb["rect_center_m"] = vec2_to_json(b.rect_center_m);
            jb["rect_size_m"] = vec2_to_json(b.rect_size_m);
            jb["rect_angle"] = b.rect_angle;
            jb["front_z"] = b.front_z;
        } else {
            jb["rect_center_px"] = vec2_to_json(b.rect_center_px);
            jb["rect_size_px"] = vec2_to_json(b.rect_size_px);
            jb["rect_angle"] = b.rect_angle;
            jb["centroid_depth"] = b.centroid_depth;
        }
        boxes.push_back(std::move(jb));
    }
    j["boxes"] = boxes;
    return j;
}

ObservationSet observation_from_json(const Json& j) {
    try {
        require_version(j);
        ObservationSet obs;
        if (j.contains("camera")) {
            const Json& jc = j["camera"];
            obs.camera = Camera{jc.at("fx").get<double>(), jc.at("fy").get<double>(),
                                jc.at("cx").get<double>(), jc.at("cy").get<double>(),
                                jc.at("shelf_distance").get<double>()};
        }
        obs.shelf = shelf_from_json(j.at("shelf"));
        for (const Json& jb : j.at("boxes")) {
            BoxObservation b;
            b.id = jb.at("id").get<std::string>();
            if (jb.contains("rect_center_m")) {
                b.metric = true;
                b.rect_center_m = vec2_from_json(jb.at("rect_center_m"), "rect_center_m");
                b.rect_size_m = vec2_from_json(jb.at("rect_size_m"), "rect_size_m");
                b.rect_angle = jb.value("rect_angle", 0.0);
                b.front_z = jb.at("front_z").get<double>();
            } else {
                b.rect_center_px = vec2_from_json(jb.at("rect_center_px"), "rect_center_px");
                b.rect_size_px = vec2_from_json(jb.at("rect_size_px"), "rect_size_px");
                b.rect_angle = jb.value("rect_angle", 0.0);
                b.centroid_depth = jb.at("centroid_depth").get<double>();
            }
            obs.boxes.push_back(std::move(b));
        }
        obs.validate();
        return obs;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("observation: ") + e.what());
    }
}

Json plan_to_json(const ActionPlan& plan) {
    Json actions = Json::array();
    for (const PlannedAction& a : plan.actions) {
        Json ja{{"box_id", a.box}};
        if (a.predicted_safe)
            ja["predicted_safe"] = *a.predicted_safe;
        else
            ja["predicted_safe"] = nullptr;
        actions.push_back(std::move(ja));
    }
    Json j{{"schema_version", kSchemaVersion}, {"approach", to_string(plan.approach)}};
    if (plan.target)
        j["target"] = *plan.target;
    else
        j["target"] = nullptr;
    j["actions"] = actions;
    j["stats"] = Json{{"simulations_run", plan.stats.simulations_run},
                      {"planning_time_s", plan.stats.planning_time_s}};
    return j;
}

ActionPlan plan_from_json(const Json& j) {
    try {
        require_version(j);
        ActionPlan plan;
        plan.approach = approach_from_string(j.at("approach").get<std::string>());
        if (j.contains("target") && !j["target"].is_null())
            plan.target = j["target"].get<std::string>();
        for (const Json& ja : j.at("actions")) {
            PlannedAction a;
            a.box = ja.at("box_id").get<std::string>();
            if (ja.contains("predicted_safe") && !ja["predicted_safe"].is_null())
                a.predicted_safe = ja["predicted_safe"].get<bool>();
            plan.actions.push_back(std::move(a));
        }
        if (j.contains("stats")) {
            plan.stats.simulations_run = j["stats"].value("simulations_run", std::uint64_t{0});
            plan.stats.planning_time_s = j["stats"].value("planning_time_s", 0.0);
        }
        return plan;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
}

Json report_to_json(const ExecutionReport& report) {
    return Json{{"schema_version", kSchemaVersion},
                {"success", report.success},
                {"boxes_removed", report.boxes_removed},
                {"collapsed_during_execution",
                 Json(std::vector<BoxId>(report.collapsed_during_execution.begin(),
                                         report.collapsed_during_execution.end()))},
                {"estimated_time_s", report.estimated_time}};
}

Json outcome_to_json(const RemovalOutcome& outcome) {
    Json disp = Json::object();
    for (const auto& [id, d] : outcome.max_displacement) disp[id] = d;
    Json j{{"schema_version", kSchemaVersion},
           {"removed", outcome.removed},
           {"classification", to_string(outcome.classification)},
           {"collapsed_boxes", outcome.collapsed_boxes}};
    if (outcome.first_collapsed)
        j["first_collapsed"] = *outcome.first_collapsed;
    else
        j["first_collapsed"] = nullptr;
    j["max_displacement"] = disp;
    return j;
}

Json aggregated_to_json(const AggregatedOutcome& outcome) {
    Json samples = Json::array();
    for (const RemovalOutcome& o : outcome.per_sample) {
        Json jo = outcome_to_json(o);
        jo.erase("schema_version");
        samples.push_back(std::move(jo));
    }
    Json j{{"schema_version", kSchemaVersion},
           {"safe", outcome.safe},
           {"collapse_union",
            Json(std::vector<BoxId>(outcome.collapse_union.begin(),
                                    outcome.collapse_union.end()))}};
    if (outcome.first_collapsed_mode)
        j["first_collapsed_mode"] = *outcome.first_collapsed_mode;
    else
        j["first_collapsed_mode"] = nullptr;
    j["per_sample"] = samples;
    return j;
}

namespace {

Json summary_to_json(const ApproachSummary& s) {
    return Json{{"runs", s.runs},
                {"success_rate", s.success_rate},
                {"avg_boxes_removed", s.avg_boxes_removed},
                {"avg_est_time_s", s.avg_est_time_s}};
}

}  // namespace

Json bench_report_to_json(const BenchReport& report, BenchTask task) {
    Json j{{"schema_version", kSchemaVersion},
           {"task", to_string(task)},
           {"physics", summary_to_json(report.physics)},
           {"heuristic", summary_to_json(report.heuristic)},
           {"success_rate_delta_pp", report.success_rate_delta_pp}};
    if (report.efficiency_improvement_pct)
        j["efficiency_improvement_pct"] = *report.efficiency_improvement_pct;
    else
        j["efficiency_improvement_pct"] = nullptr;
    j["rows"] = report.rows.size();
    j["errors"] = report.errors;
    return j;
}

namespace {

template <typename T>
void overlay(const Json& j, const char* key, T& field) {
    if (j.contains(key)) field = j[key].get<T>();
}

}  // namespace

SimConfig sim_config_from_json(const Json& j, SimConfig base) {
    static const std::set<std::string> known{
        "schema_version",     "gravity",        "density",
        "surface_friction",   "spinning_friction", "timestep",
        "solver_iterations",  "contact_slop",   "settle_time",
        "disturbance_force_std", "extraction_speed", "monitor_time",
        "rng_seed",           "depth_min",      "per_pick_cost"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ParseError("unknown config key: " + key);
    }
    overlay(j, "gravity", base.gravity);
    overlay(j, "density", base.density);
    overlay(j, "surface_friction", base.surface_friction);
    overlay(j, "spinning_friction", base.spinning_friction);
    overlay(j, "timestep", base.timestep);
    overlay(j, "solver_iterations", base.solver_iterations);
    overlay(j, "contact_slop", base.contact_slop);
    overlay(j, "settle_time", base.settle_time);
    overlay(j, "disturbance_force_std", base.disturbance_force_std);
    overlay(j, "extraction_speed", base.extraction_speed);
    overlay(j, "monitor_time", base.monitor_time);
    overlay(j, "rng_seed", base.rng_seed);
    overlay(j, "depth_min", base.depth_min);
    overlay(j, "per_pick_cost", base.per_pick_cost);
    base.validate();
    return base;
}

Json sim_config_to_json(const SimConfig& cfg) {
    return Json{{"schema_version", kSchemaVersion},
                {"gravity", cfg.gravity},
                {"density", cfg.density},
                {"surface_friction", cfg.surface_friction},
                {"spinning_friction", cfg.spinning_friction},
                {"timestep", cfg.timestep},
                {"solver_iterations", cfg.solver_iterations},
                {"contact_slop", cfg.contact_slop},
                {"settle_time", cfg.settle_time},
                {"disturbance_force_std", cfg.disturbance_force_std},
                {"extraction_speed", cfg.extraction_speed},
                {"monitor_time", cfg.monitor_time},
                {"rng_seed", cfg.rng_seed},
                {"depth_min", cfg.depth_min},
                {"per_pick_cost", cfg.per_pick_cost}};
}

CollapseThresholds thresholds_from_json(const Json& j, CollapseThresholds base) {
    static const std::set<std::string> known{"schema_version", "linear_speed", "angular_speed",
                                             "displacement", "sustain_steps"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ParseError("unknown threshold key: " + key);
    }
    overlay(j, "linear_speed", base.linear_speed);
    overlay(j, "angular_speed", base.angular_speed);
    overlay(j, "displacement", base.displacement);
    overlay(j, "sustain_steps", base.sustain_steps);
    base.validate();
    return base;
}

Json thresholds_to_json(const CollapseThresholds& thresholds) {
    return Json{{"schema_version", kSchemaVersion},
                {"linear_speed", thresholds.linear_speed},
                {"angular_speed", thresholds.angular_speed},
                {"displacement", thresholds.displacement},
                {"sustain_steps", thresholds.sustain_steps}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json load_json_file(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string check_document(const Json& j, const std::string& schema) {
    std::string kind = schema;
    if (kind.empty()) {
        if (j.contains("boxes") && j.contains("shelf")) {
            bool scene_like = !j["boxes"].empty() ? j["boxes"][0].contains("half_extents")
                                                  : !j.contains("camera");
            kind = scene_like ? "scene" : "observation";
        } else if (j.contains("actions")) {
            kind = "plan";
        } else if (j.contains("boxes_removed")) {
            kind = "report";
        } else if (j.contains("classification")) {
            kind = "outcome";
        } else if (j.contains("gravity")) {
            kind = "config";
        } else if (j.contains("linear_speed")) {
            kind = "thresholds";
        } else {
            throw ParseError("cannot detect document schema");
        }
    }

    if (kind == "scene") {
        scene_from_json(j);
    } else if (kind == "observation") {
        observation_from_json(j);
    } else if (kind == "plan") {
        plan_from_json(j);
    } else if (kind == "report") {
        require_version(j);
        (void)j.at("success").get<bool>();
        (void)j.at("boxes_removed").get<int>();
    } else if (kind == "outcome") {
        require_version(j);
        (void)classification_from_string(j.at("classification").get<std::string>());
    } else if (kind == "config") {
        sim_config_from_json(j);
    } else if (kind == "thresholds") {
        thresholds_from_json(j);
    } else {
        throw ParseError("unknown schema: " + kind);
    }
    return kind;
}

}  // namespace shelfsim
