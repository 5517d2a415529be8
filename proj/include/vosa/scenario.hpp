#pragma once

#include "vosa/controller.hpp"
#include "vosa/human.hpp"
#include "vosa/scene.hpp"
#include "vosa/task.hpp"

#include <string>
#include <vector>

namespace vosa {

struct ScenarioSpec {
  std::string name;
  SceneState scene;
  std::vector<PlanStep> plan;  // also the goal list
  std::vector<Vec3> sag_intents;
  double timeout = 120.0;  // simulated seconds
  ControllerConfig assist;  // placement_intents are filled from the pedestals
};

/// Throws ConfigError: ids resolve, events ordered, assist parameters sane.
void validate(const ScenarioSpec& spec);

/// Controller configuration for an episode of `spec`.
ControllerConfig controller_config(const ScenarioSpec& spec);

/// "teleop", "sag" (uses spec.sag_intents) or "vosa".
AssistMode make_mode(const ScenarioSpec& spec, const std::string& name);

const std::vector<std::string>& builtin_scenario_names();
/// Throws ConfigError for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);

/// Default model for "goal_directed", "stubborn" or "compliant" following the scenario plan.
HumanModel make_human(const ScenarioSpec& spec, const std::string& kind);

}  // namespace vosa
