#include "vosa/scenario.hpp"

#include "vosa/error.hpp"

#include <set>

namespace vosa {

void validate(const ScenarioSpec& spec)
{
  validate_scene(spec.scene);
  spec.assist.validate();
  if (!(spec.timeout > 0.0)) throw ConfigError("scenario '" + spec.name + "': timeout must be positive");
  if (spec.plan.empty()) throw ConfigError("scenario '" + spec.name + "': plan is empty");

  std::set<std::string> known;
  for (const auto& o : spec.scene.objects) known.insert(o.id);
  for (const auto& ev : spec.scene.pending_events)
    if (const auto* add = std::get_if<AddObject>(&ev.action)) known.insert(add->object.id);
  for (const auto& step : spec.plan) {
    if (!known.count(step.object))
      throw ConfigError("scenario '" + spec.name + "': plan names unknown object '" + step.object + "'");
    if (step.pedestal && !spec.scene.find_pedestal(*step.pedestal))
      throw ConfigError("scenario '" + spec.name + "': plan names unknown pedestal '" + *step.pedestal + "'");
  }
  for (const auto& g : spec.sag_intents)
    if (!all_finite(g)) throw ConfigError("scenario '" + spec.name + "': non-finite SAG intent");
}

ControllerConfig controller_config(const ScenarioSpec& spec)
{
  ControllerConfig cfg = spec.assist;
  cfg.placement_intents.clear();
  for (const auto& p : spec.scene.pedestals) cfg.placement_intents.push_back(p.position);
  return cfg;
}

AssistMode make_mode(const ScenarioSpec& spec, const std::string& name)
{
  if (name == "teleop") return TeleopMode{};
  if (name == "sag") return SagMode{spec.sag_intents};
  if (name == "vosa") return VosaMode{};
  throw ConfigError("unknown assistance mode '" + name + "' (expected teleop, sag or vosa)");
}

HumanModel make_human(const ScenarioSpec& spec, const std::string& kind)
{
  HumanModel m;
  m.plan = spec.plan;
  if (kind == "goal_directed")
    m.kind = GoalDirectedHuman{};
  else if (kind == "stubborn")
    m.kind = StubbornHuman{};
  else if (kind == "compliant")
    m.kind = CompliantHuman{};
  else
    throw ConfigError("unknown human model '" + kind + "' (expected goal_directed, stubborn or compliant)");
  return m;
}

namespace {

SceneObject sphere(const std::string& id, double r, const Vec3& p) { return {id, Sphere{r}, p, true}; }

SceneObject box(const std::string& id, const Vec3& half, const Vec3& p) { return {id, Box{half}, p, true}; }

SceneState base_scene()
{
  SceneState s;
  s.bounds = Bounds(Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.6));
  s.effector.home = Vec3(0.0, 0.0, 0.38);
  s.effector.position = s.effector.home;
  return s;
}

ControllerConfig base_assist()
{
  ControllerConfig c;
  c.curve.c_lo = 0.3;
  c.curve.c_hi = 0.6;
  return c;
}

ScenarioSpec pick_and_place()
{
  ScenarioSpec s;
  s.name = "pick_and_place";
  s.scene = base_scene();
  s.scene.objects = {
      sphere("ball", 0.03, Vec3(0.13, 0.0, 0.03)),
      box("block", Vec3(0.025, 0.025, 0.025), Vec3(-0.13, 0.0, 0.025)),
  };
  s.scene.pedestals = {
      {"right", Vec3(0.13, 0.28, 0.03), 0.06},
      {"left", Vec3(-0.13, 0.28, 0.025), 0.06},
  };
  s.plan = {{"ball", "right"}, {"block", "left"}};
  // Preset top grasp points.
  s.sag_intents = {Vec3(0.13, 0.0, 0.06), Vec3(-0.13, 0.0, 0.05)};
  s.assist = base_assist();
  return s;
}

ScenarioSpec deceptive_grasping()
{
  ScenarioSpec s;
  s.name = "deceptive_grasping";
  s.scene = base_scene();
  s.scene.objects = {
      sphere("decoy_left", 0.03, Vec3(0.08, 0.055, 0.03)),
      sphere("decoy_right", 0.03, Vec3(0.08, -0.055, 0.03)),
      sphere("target", 0.03, Vec3(0.17, 0.0, 0.03)),
  };
  s.plan = {{"target", std::nullopt}};
  s.sag_intents = {Vec3(0.08, 0.055, 0.06), Vec3(0.08, -0.055, 0.06)};
  s.assist = base_assist();
  return s;
}

ScenarioSpec shelving()
{
  ScenarioSpec s;
  s.name = "shelving";
  s.scene = base_scene();
  const Vec3 bottle(0.02, 0.02, 0.04);
  s.scene.objects = {
      box("cola", bottle, Vec3(0.0, -0.03, 0.04)),
      box("water", bottle, Vec3(-0.12, -0.04, 0.04)),
  };
  s.scene.pending_events = {
      {1.0, AddObject{box("juice", bottle, Vec3(0.12, 0.0, 0.04))}},
      {2.0, MoveObject{"water", Vec3(-0.07, 0.0, 0.04)}},
  };
  s.scene.pedestals = {
      {"slot_1", Vec3(-0.1, 0.28, 0.04), 0.05},
      {"slot_2", Vec3(0.0, 0.28, 0.04), 0.05},
      {"slot_3", Vec3(0.1, 0.28, 0.04), 0.05},
  };
  s.plan = {{"cola", "slot_1"}, {"water", "slot_2"}, {"juice", "slot_3"}};
  // Layout as planned before the restock: water's old spot and juice's intended one.
  s.sag_intents = {Vec3(0.0, -0.03, 0.08), Vec3(-0.12, -0.04, 0.08), Vec3(0.12, -0.06, 0.08)};
  s.assist = base_assist();
  return s;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names()
{
  static const std::vector<std::string> names{"pick_and_place", "deceptive_grasping", "shelving"};
  return names;
}

ScenarioSpec builtin_scenario(const std::string& name)
{
  if (name == "pick_and_place") return pick_and_place();
  if (name == "deceptive_grasping") return deceptive_grasping();
  if (name == "shelving") return shelving();
  throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace vosa
