#include "vosa/controller.hpp"
#include "vosa/harness.hpp"
#include "vosa/scenario.hpp"

#include <doctest.h>

#include <random>

using namespace vosa;

namespace {

SceneState one_ball_scene()
{
  SceneState s;
  s.bounds = Bounds(Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.6));
  s.effector.home = Vec3(0.0, 0.0, 0.38);
  s.effector.position = s.effector.home;
  s.objects.push_back({"ball", Sphere{0.03}, Vec3(0.1, 0.0, 0.03), true});
  s.pedestals.push_back({"p", Vec3(0.1, 0.28, 0.03), 0.06});
  return s;
}

ControllerConfig assist_config()
{
  ControllerConfig c;
  c.curve.c_lo = 0.3;
  c.curve.c_hi = 0.6;
  c.placement_intents = {Vec3(0.1, 0.28, 0.03)};
  return c;
}

}  // namespace

TEST_CASE("teleop passes the human command through in every phase")
{
  const SceneState s = one_ball_scene();
  for (Phase p : {Phase::object_sensing, Phase::grasping, Phase::placing, Phase::active_sensing}) {
    ControllerState cs = make_controller(TeleopMode{}, assist_config());
    cs.phase = p;
    Rng rng(0);
    const TickResult r = controller_tick(cs, s, Vec3(0, 1, 0), GripperCommand::none, rng);
    CHECK(r.command == Vec3(0, 1, 0));
    CHECK(r.state.last_blend.alpha == 0.0);
  }
}

TEST_CASE("SAG hands off at the cap near its only intent")
{
  SceneState s = one_ball_scene();
  const Vec3 g(0.1, 0.0, 0.06);
  s.effector.position = g + Vec3(0.0, 0.0, 0.1);
  ControllerState cs = make_controller(SagMode{{g}}, assist_config());
  cs.phase = Phase::grasping;
  cs.grasp_intents.intents = {g};
  Rng rng(0);
  const TickResult r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::none, rng);
  // c = 0.7 exp(-0.1) >= c_hi.
  CHECK(r.state.last_blend.c >= 0.6);
  CHECK(r.state.last_blend.alpha == 0.8);
  CHECK((r.command - Vec3(0, 0, -0.8)).norm() <= 1e-12);
}

TEST_CASE("gripper commands drive the cycle")
{
  const SceneState s = one_ball_scene();
  Rng rng(0);
  ControllerState cs = make_controller(VosaMode{}, assist_config());

  cs.phase = Phase::placing;
  TickResult r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::open, rng);
  CHECK(r.state.phase == Phase::active_sensing);
  CHECK(r.gripper == GripperCommand::open);

  cs.phase = Phase::grasping;
  r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::close, rng);
  CHECK(r.state.phase == Phase::placing);
  CHECK(r.gripper == GripperCommand::close);

  // Off-cycle clicks are ignored.
  r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::open, rng);
  CHECK(r.state.phase == Phase::grasping);
  CHECK(r.gripper == GripperCommand::none);
}

TEST_CASE("VOSA leaves object sensing once it perceives something")
{
  const SceneState s = one_ball_scene();
  Rng rng(0);
  const ControllerState cs = make_controller(VosaMode{}, assist_config());
  const TickResult r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::none, rng);
  CHECK(r.diag.sensing_attempted);
  CHECK(r.diag.intents_updated);
  REQUIRE(r.state.grasp_intents.intents.size() == 1);
  CHECK((r.state.grasp_intents.intents[0] - Vec3(0.1, 0.0, 0.03)).norm() <= 0.03);
  CHECK(r.state.phase == Phase::grasping);
}

TEST_CASE("active sensing pulls home at the cap and ends within home_radius")
{
  SceneState s = one_ball_scene();
  s.effector.position = s.effector.home + Vec3(0.0, 0.2, 0.0);
  ControllerState cs = make_controller(VosaMode{}, assist_config());
  cs.phase = Phase::active_sensing;
  Rng rng(0);
  TickResult r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::none, rng);
  CHECK(r.state.last_blend.alpha == 0.8);
  CHECK((r.command - Vec3(0, -0.8, 0)).norm() <= 1e-12);
  CHECK(r.state.phase == Phase::active_sensing);

  s.effector.position = s.effector.home + Vec3(0.0, 0.04, 0.0);
  r = controller_tick(cs, s, Vec3::Zero(), GripperCommand::none, rng);
  CHECK(r.state.phase == Phase::object_sensing);
  CHECK_FALSE(r.state.sensed_this_visit);
}

TEST_CASE("episode_done")
{
  SceneState s;
  s.bounds = Bounds(Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.6));
  s.objects = {{"a", Sphere{0.03}, Vec3(0.1, 0.28, 0.03), true}, {"b", Sphere{0.03}, Vec3(-0.1, 0.28, 0.03), true}};
  s.pedestals = {{"pa", Vec3(0.1, 0.28, 0.03), 0.06}, {"pb", Vec3(-0.1, 0.28, 0.03), 0.06}};
  const std::vector<PlanStep> goals{{"a", "pa"}, {"b", "pb"}};
  const ControllerState cs = make_controller(VosaMode{}, assist_config());

  SUBCASE("both placed") { CHECK(episode_done(cs, s, goals)); }
  SUBCASE("one still held")
  {
    s.effector.attached = "b";
    CHECK_FALSE(episode_done(cs, s, goals));
  }
  SUBCASE("spawn pending")
  {
    s.pending_events.push_back({5.0, AddObject{{"c", Sphere{0.03}, Vec3(0, 0, 0.03), true}}});
    CHECK_FALSE(episode_done(cs, s, goals));
  }
}

TEST_CASE("phase cycle helpers")
{
  CHECK(next_phase(Phase::active_sensing) == Phase::object_sensing);
  CHECK(legal_transition(Phase::grasping, Phase::grasping));
  CHECK(legal_transition(Phase::grasping, Phase::placing));
  CHECK_FALSE(legal_transition(Phase::grasping, Phase::active_sensing));
  CHECK_FALSE(legal_transition(Phase::placing, Phase::grasping));
  for (Phase p : {Phase::object_sensing, Phase::grasping, Phase::placing, Phase::active_sensing})
    CHECK(phase_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(phase_from_string("flying"), ParseError);
}

TEST_CASE("property: legality, teleop neutrality, gate respect, SAG staleness over scenario episodes")
{
  for (const auto& name : builtin_scenario_names()) {
    const ScenarioSpec spec = builtin_scenario(name);
    for (const std::string mode : {"teleop", "sag", "vosa"}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const EpisodeLog log = run_episode(spec, mode, make_human(spec, "goal_directed"), seed);
        INFO(name << " " << mode << " seed " << seed);
        CHECK(check_legality(log).empty());
        std::uint64_t first_hash = 0;
        bool have_hash = false;
        for (const auto& t : log.ticks) {
          CHECK(legal_transition(t.phase, t.next_phase));
          if (mode == "teleop") {
            CHECK(t.blend.u == clamp_unit(t.u_in));
            CHECK(t.blend.alpha == 0.0);
          }
          if (mode == "vosa" && t.sensing_attempted && !t.gate_open) CHECK_FALSE(t.intents_updated);
          if (mode == "sag" && t.intent_count > 0) {
            if (!have_hash) first_hash = t.intents_hash;
            have_hash = true;
            CHECK(t.intents_hash == first_hash);
          }
        }
      }
    }
  }
}
