#pragma once

#include "vosa/harness.hpp"
#include "vosa/scenario.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace vosa {

using Json = nlohmann::json;

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

Json to_json(const SceneState& s);
SceneState scene_from_json(const Json& j);

Json to_json(const ControllerConfig& c);  // placement_intents are not serialized
ControllerConfig assist_from_json(const Json& j);

Json to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const Json& j);

/// Reads a scenario file; ParseError for malformed JSON, ConfigError when it does not validate.
ScenarioSpec load_scenario_file(const std::string& path);
/// A built-in name, or else a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& name_or_path);

Json to_json(const HumanModel& h);  // kind and traits; the plan comes from the scenario
HumanModel human_from_json(const Json& j, const std::vector<PlanStep>& plan);

Json to_json(const TickRecord& r);
TickRecord tick_from_json(const Json& j);

/// One header line, one line per tick, one summary line.
void write_log(std::ostream& os, const EpisodeLog& log);
EpisodeLog read_log(std::istream& is);
void save_log(const std::string& path, const EpisodeLog& log);
EpisodeLog load_log(const std::string& path);

Json header_to_json(const EpisodeHeader& h);
EpisodeHeader header_from_json(const Json& j);

}  // namespace vosa
