#include "vosa/error.hpp"
#include "vosa/human.hpp"
#include "vosa/scenario.hpp"

#include <doctest.h>

using namespace vosa;

namespace {

SceneState reach_scene(const Vec3& effector)
{
  SceneState s;
  s.bounds = Bounds(Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.6));
  s.effector.home = Vec3(0.0, 0.0, 0.38);
  s.effector.position = effector;
  s.objects.push_back({"ball", Sphere{0.03}, Vec3(0.2, 0.0, 0.03), true});
  s.pedestals.push_back({"p", Vec3(0.2, 0.28, 0.03), 0.06});
  return s;
}

ControllerState grasping(AssistMode mode)
{
  ControllerConfig cfg;
  cfg.placement_intents = {Vec3(0.2, 0.28, 0.03)};
  ControllerState cs = make_controller(std::move(mode), cfg);
  cs.phase = Phase::grasping;
  return cs;
}

HumanModel model_of(HumanKind kind)
{
  HumanModel m;
  m.kind = kind;
  m.plan = {{"ball", "p"}};
  return m;
}

}  // namespace

TEST_CASE("noiseless goal-directed user pushes straight at a target due +x")
{
  const SceneState s = reach_scene(Vec3(0.0, 0.0, 0.03 + 0.3));
  Rng rng(0);
  const HumanOutput out = human_command(model_of(GoalDirectedHuman{0.0, 0.02}), {}, s, grasping(TeleopMode{}), rng);
  CHECK(out.u_h == Vec3(1, 0, 0));
  CHECK(out.gripper == GripperCommand::none);
}

TEST_CASE("compliant user lets go when the highlighted goal is being approached")
{
  const SceneState s = reach_scene(Vec3(0.0, 0.0, 0.3));
  ControllerState cs = grasping(VosaMode{});
  cs.grasp_intents.intents = {Vec3(0.2, 0.0, 0.03), Vec3(-0.2, 0.0, 0.03)};
  const Vec3 toward = (Vec3(0.2, 0.0, 0.03) - s.effector.position).normalized();
  cs.last_blend.alpha = 0.8;
  cs.last_blend.u = 0.8 * toward;

  SUBCASE("highlight matches the goal")
  {
    cs.last_blend.selected_intent = 0;
    Rng rng(1);
    CHECK(human_command(model_of(CompliantHuman{}), {}, s, cs, rng).u_h == Vec3::Zero());
  }
  SUBCASE("highlight on another object")
  {
    cs.last_blend.selected_intent = 1;
    Rng rng(1);
    CHECK(human_command(model_of(CompliantHuman{}), {}, s, cs, rng).u_h != Vec3::Zero());
  }
  SUBCASE("assistance heads the wrong way")
  {
    cs.last_blend.selected_intent = 0;
    cs.last_blend.u = Vec3(0.0, 0.8, 0.0);
    Rng rng(1);
    CHECK(human_command(model_of(CompliantHuman{}), {}, s, cs, rng).u_h != Vec3::Zero());
  }
}

TEST_CASE("exhausted plan gives no input")
{
  SceneState s = reach_scene(Vec3(0.0, 0.0, 0.3));
  s.objects[0].position = s.pedestals[0].position;
  Rng rng(0);
  const HumanOutput out = human_command(model_of(StubbornHuman{}), {}, s, grasping(TeleopMode{}), rng);
  CHECK(out.u_h == Vec3::Zero());
  CHECK(out.gripper == GripperCommand::none);
}

TEST_CASE("human model validation")
{
  HumanModel m = model_of(CompliantHuman{});
  std::get<CompliantHuman>(m.kind).cone_angle = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = model_of(GoalDirectedHuman{-0.1, 0.02});
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = model_of(StubbornHuman{});
  m.traits.switch_ticks = -1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("property: input never leaves the unit ball")
{
  for (const auto& name : builtin_scenario_names()) {
    const ScenarioSpec spec = builtin_scenario(name);
    for (const std::string kind : {"goal_directed", "stubborn", "compliant"}) {
      HumanModel m = make_human(spec, kind);
      ControllerState cs = make_controller(make_mode(spec, "vosa"), controller_config(spec));
      SceneState scene = spec.scene;
      HumanState hs;
      Rng rng(7), prng(8);
      for (int i = 0; i < 400; ++i) {
        const HumanOutput h = human_command(m, hs, scene, cs, rng);
        CHECK(h.u_h.norm() <= 1.0 + 1e-12);
        hs = h.state;
        const TickResult r = controller_tick(cs, scene, h.u_h, h.gripper, prng);
        cs = r.state;
        scene = step_scene(scene, r.command, r.gripper, scene.params.dt);
      }
    }
  }
}

TEST_CASE("property: noiseless goal-directed teleop closes in on the target")
{
  for (double y : {-0.2, -0.05, 0.0, 0.1, 0.25}) {
    SceneState s = reach_scene(Vec3(-0.1, y, 0.38));
    HumanModel m = model_of(GoalDirectedHuman{0.0, 0.02});
    m.traits.switch_ticks = 0;
    ControllerState cs = grasping(TeleopMode{});
    HumanState hs;
    Rng rng(0);
    const SceneObject target = s.objects[0];
    double prev = (target.position - s.effector.position).norm();
    bool reached = false;
    for (int i = 0; i < 2000 && !reached; ++i) {
      const HumanOutput h = human_command(m, hs, s, cs, rng);
      hs = h.state;
      if (h.gripper == GripperCommand::close) {
        reached = true;
        break;
      }
      s = step_scene(s, h.u_h, GripperCommand::none, s.params.dt);
      const double d = (target.position - s.effector.position).norm();
      CHECK(d < prev);
      prev = d;
    }
    CHECK(reached);
    CHECK(surface_distance(target, s.effector.position) <= m.traits.grasp_trigger);
  }
}

TEST_CASE("property: with mode switches the distance never grows")
{
  SceneState s = reach_scene(Vec3(-0.1, 0.1, 0.38));
  HumanModel m = model_of(GoalDirectedHuman{0.0, 0.02});
  ControllerState cs = grasping(TeleopMode{});
  HumanState hs;
  Rng rng(0);
  double prev = (s.objects[0].position - s.effector.position).norm();
  for (int i = 0; i < 2000; ++i) {
    const HumanOutput h = human_command(m, hs, s, cs, rng);
    hs = h.state;
    if (h.gripper == GripperCommand::close) break;
    s = step_scene(s, h.u_h, GripperCommand::none, s.params.dt);
    const double d = (s.objects[0].position - s.effector.position).norm();
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("property: identical seeds give identical command sequences")
{
  const ScenarioSpec spec = builtin_scenario("pick_and_place");
  auto run = [&](std::uint64_t seed) {
    const HumanModel m = make_human(spec, "goal_directed");
    const ControllerState cs = make_controller(TeleopMode{}, controller_config(spec));
    SceneState scene = spec.scene;
    HumanState hs;
    Rng rng(seed);
    std::vector<Vec3> seq;
    for (int i = 0; i < 200; ++i) {
      const HumanOutput h = human_command(m, hs, scene, cs, rng);
      hs = h.state;
      seq.push_back(h.u_h);
      scene = step_scene(scene, h.u_h, h.gripper, scene.params.dt);
    }
    return seq;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}
