#ifndef SHELFSIM_JSON_IO_HPP
#define SHELFSIM_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "shelfsim/bench.hpp"
#include "shelfsim/collapse.hpp"
#include "shelfsim/planners.hpp"
#include "shelfsim/reconstruct.hpp"
#include "shelfsim/scene.hpp"

namespace shelfsim {

// Insertion-ordered JSON keeps file output stable across runs.
using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

Json observation_to_json(const ObservationSet& obs);
ObservationSet observation_from_json(const Json& j);

Json plan_to_json(const ActionPlan& plan);
ActionPlan plan_from_json(const Json& j);

Json report_to_json(const ExecutionReport& report);

Json outcome_to_json(const RemovalOutcome& outcome);
Json aggregated_to_json(const AggregatedOutcome& outcome);

Json bench_report_to_json(const BenchReport& report, BenchTask task);

// Overlays fields present in j onto the defaults; unknown keys are errors.
SimConfig sim_config_from_json(const Json& j, SimConfig base = {});
Json sim_config_to_json(const SimConfig& cfg);
CollapseThresholds thresholds_from_json(const Json& j, CollapseThresholds base = {});
Json thresholds_to_json(const CollapseThresholds& thresholds);

// File helpers. Writers emit a trailing newline; readers throw ParseError on
// malformed input.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

// Structural validation for the `check` subcommand. `schema` is one of
// scene|observation|plan|report|outcome|config|thresholds, or empty to
// auto-detect. Throws ParseError with a reason on failure; returns the
// detected schema name.
std::string check_document(const Json& j, const std::string& schema = "");

}  // namespace shelfsim

#endif
