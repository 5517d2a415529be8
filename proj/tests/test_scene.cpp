#include "vosa/error.hpp"
#include "vosa/rng.hpp"
#include "vosa/scene.hpp"

#include <doctest.h>

#include <random>

using namespace vosa;

namespace {

SceneState table_scene()
{
  SceneState s;
  s.bounds = Bounds(Vec3(-0.4, -0.4, 0.0), Vec3(0.4, 0.4, 0.6));
  s.effector.position = Vec3(0.0, 0.0, 0.3);
  s.effector.home = s.effector.position;
  return s;
}

SceneObject ball(const std::string& id, const Vec3& p, double r = 0.03) { return {id, Sphere{r}, p, true}; }

bool same_state(const SceneState& a, const SceneState& b)
{
  if (a.t != b.t || a.objects.size() != b.objects.size()) return false;
  if (a.effector.position != b.effector.position || a.effector.gripper != b.effector.gripper) return false;
  if (a.effector.attached != b.effector.attached || a.effector.grasp_offset != b.effector.grasp_offset) return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i)
    if (a.objects[i].id != b.objects[i].id || a.objects[i].position != b.objects[i].position) return false;
  return a.pending_events.size() == b.pending_events.size();
}

}  // namespace

TEST_CASE("zero command leaves the effector in place and advances time")
{
  SceneState s = table_scene();
  for (double dt : {0.01, 0.05, 0.2}) {
    const SceneState n = step_scene(s, Vec3::Zero(), GripperCommand::none, dt);
    CHECK(n.effector.position == s.effector.position);
    CHECK(n.t == doctest::Approx(s.t + dt));
  }
}

TEST_CASE("unit command moves v_max * dt")
{
  SceneState s = table_scene();
  const SceneState n = step_scene(s, Vec3(1.0, 0.0, 0.0), GripperCommand::none, 0.05);
  const Vec3 d = n.effector.position - s.effector.position;
  CHECK(d.x() == doctest::Approx(0.0025).epsilon(1e-12));
  CHECK(d.y() == 0.0);
  CHECK(d.z() == 0.0);
}

TEST_CASE("commands longer than unit are clamped before integration")
{
  SceneState s = table_scene();
  const SceneState n = step_scene(s, Vec3(3.0, 4.0, 0.0), GripperCommand::none, 0.05);
  CHECK((n.effector.position - s.effector.position).norm() == doctest::Approx(0.0025));
}

TEST_CASE("close out of range closes the gripper without attaching")
{
  SceneState s = table_scene();
  s.objects.push_back(ball("b", Vec3(0.0, 0.0, 0.03)));
  // Surface distance 2 * r_g.
  s.effector.position = Vec3(0.0, 0.0, 0.06 + 2.0 * s.params.grasp_radius);
  const SceneState n = step_scene(s, Vec3::Zero(), GripperCommand::close, 0.05);
  CHECK(n.effector.gripper == Gripper::closed);
  CHECK_FALSE(n.effector.attached);
  REQUIRE(n.annotations.size() == 1);
  CHECK(n.annotations[0].kind == AnnotationKind::grasp_out_of_range);
}

TEST_CASE("close within range attaches and the object follows the effector")
{
  SceneState s = table_scene();
  s.objects.push_back(ball("b", Vec3(0.0, 0.0, 0.03)));
  s.effector.position = Vec3(0.0, 0.0, 0.07);
  SceneState n = step_scene(s, Vec3::Zero(), GripperCommand::close, 0.05);
  REQUIRE(n.effector.attached);
  CHECK(*n.effector.attached == "b");
  n = step_scene(n, Vec3(0.0, 1.0, 0.0), GripperCommand::none, 0.05);
  CHECK(n.find_object("b")->position.y() == doctest::Approx(0.0025));
  // Release settles the object on the table.
  n = step_scene(n, Vec3::Zero(), GripperCommand::open, 0.05);
  CHECK_FALSE(n.effector.attached);
  CHECK(n.find_object("b")->position.z() == doctest::Approx(0.03));
}

TEST_CASE("closing an already closed gripper never attaches")
{
  SceneState s = table_scene();
  s.objects.push_back(ball("b", Vec3(0.0, 0.0, 0.03)));
  s.effector.position = Vec3(0.0, 0.0, 0.07);
  s.effector.gripper = Gripper::closed;
  const SceneState n = step_scene(s, Vec3::Zero(), GripperCommand::close, 0.05);
  CHECK_FALSE(n.effector.attached);
}

TEST_CASE("motion is clamped to the workspace")
{
  SceneState s = table_scene();
  s.effector.position = Vec3(0.399, 0.0, 0.3);
  const SceneState n = step_scene(s, Vec3(1.0, 0.0, 0.0), GripperCommand::none, 0.05);
  CHECK(n.effector.position.x() == 0.4);
  REQUIRE_FALSE(n.annotations.empty());
  CHECK(n.annotations[0].kind == AnnotationKind::clamped_to_bounds);
}

TEST_CASE("object_on_pedestal")
{
  SceneState s = table_scene();
  s.pedestals.push_back({"p", Vec3(0.1, 0.1, 0.03), 0.06});
  s.objects.push_back(ball("b", Vec3(0.1, 0.1, 0.03)));

  SUBCASE("centred and released") { CHECK(object_on_pedestal(s, "b", "p")); }
  SUBCASE("attached above the pedestal")
  {
    s.effector.attached = "b";
    CHECK_FALSE(object_on_pedestal(s, "b", "p"));
  }
  SUBCASE("outside the footprint")
  {
    s.objects[0].position = Vec3(0.1 + 1.5 * 0.06, 0.1, 0.03);
    CHECK_FALSE(object_on_pedestal(s, "b", "p"));
  }
  SUBCASE("unknown ids")
  {
    CHECK_THROWS_AS(object_on_pedestal(s, "nope", "p"), ConfigError);
    CHECK_THROWS_AS(object_on_pedestal(s, "b", "nope"), ConfigError);
  }
}

TEST_CASE("spawn events fire at their time")
{
  SceneState s = table_scene();
  s.objects.push_back(ball("a", Vec3(0.1, 0.0, 0.03)));
  s.pending_events.push_back({0.1, AddObject{ball("b", Vec3(-0.1, 0.0, 0.03))}});
  s.pending_events.push_back({0.2, MoveObject{"a", Vec3(0.2, 0.0, 0.03)}});
  s.pending_events.push_back({0.3, RemoveObject{"b"}});
  validate_scene(s);

  s = step_scene(s, Vec3::Zero(), GripperCommand::none, 0.05);
  CHECK(s.objects.size() == 1);
  s = step_scene(s, Vec3::Zero(), GripperCommand::none, 0.05);
  CHECK(s.objects.size() == 2);
  s = step_scene(step_scene(s, Vec3::Zero(), GripperCommand::none, 0.05), Vec3::Zero(), GripperCommand::none, 0.05);
  CHECK(s.find_object("a")->position.x() == doctest::Approx(0.2));
  s = step_scene(step_scene(s, Vec3::Zero(), GripperCommand::none, 0.05), Vec3::Zero(), GripperCommand::none, 0.05);
  CHECK(s.objects.size() == 1);
  CHECK(s.pending_events.empty());
}

TEST_CASE("validate_scene rejects malformed scenes")
{
  SceneState s = table_scene();
  s.objects.push_back(ball("a", Vec3(0.1, 0.0, 0.03)));

  SUBCASE("duplicate ids")
  {
    s.objects.push_back(ball("a", Vec3(-0.1, 0.0, 0.03)));
    CHECK_THROWS_AS(validate_scene(s), ConfigError);
  }
  SUBCASE("non-positive radius")
  {
    s.objects.push_back(ball("b", Vec3(-0.1, 0.0, 0.03), 0.0));
    CHECK_THROWS_AS(validate_scene(s), ConfigError);
  }
  SUBCASE("unordered events")
  {
    s.pending_events.push_back({2.0, MoveObject{"a", Vec3::Zero()}});
    s.pending_events.push_back({1.0, MoveObject{"a", Vec3::Zero()}});
    CHECK_THROWS_AS(validate_scene(s), ConfigError);
  }
  SUBCASE("event on an unknown object")
  {
    s.pending_events.push_back({1.0, RemoveObject{"ghost"}});
    CHECK_THROWS_AS(validate_scene(s), ConfigError);
  }
}

TEST_CASE("property: determinism, speed cap, exclusive attachment, event conservation")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = derive_rng(seed, 0);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_int_distribution<int> g(0, 9);

    SceneState s0 = table_scene();
    s0.objects.push_back(ball("a", Vec3(0.05, 0.0, 0.03)));
    s0.objects.push_back(ball("b", Vec3(-0.05, 0.0, 0.03)));
    s0.effector.position = Vec3(0.0, 0.0, 0.08);
    s0.pending_events.push_back({0.5, AddObject{ball("c", Vec3(0.2, 0.2, 0.03))}});
    s0.pending_events.push_back({1.0, RemoveObject{"a"}});
    s0.pending_events.push_back({1.5, AddObject{ball("d", Vec3(-0.2, 0.2, 0.03))}});
    const int adds = 2, removes = 1;

    std::vector<std::pair<Vec3, GripperCommand>> cmds;
    for (int i = 0; i < 60; ++i) {
      const int k = g(rng);
      const GripperCommand gc = k == 0 ? GripperCommand::close : k == 1 ? GripperCommand::open : GripperCommand::none;
      cmds.push_back({Vec3(u(rng), u(rng), u(rng)), gc});
    }

    auto run = [&] {
      std::vector<SceneState> states{s0};
      for (const auto& [c, gc] : cmds) states.push_back(step_scene(states.back(), c, gc, 0.05));
      return states;
    };
    const auto a = run();
    const auto b = run();
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(same_state(a[i], b[i]));

    for (std::size_t i = 1; i < a.size(); ++i) {
      const double step = (a[i].effector.position - a[i - 1].effector.position).norm();
      CHECK(step <= s0.params.v_max * 0.05 + 1e-12);
      const bool newly_attached = a[i].effector.attached && !a[i - 1].effector.attached;
      if (newly_attached) {
        CHECK(a[i - 1].effector.gripper == Gripper::open);
        const SceneObject* o = a[i - 1].find_object(*a[i].effector.attached);
        REQUIRE(o);
        CHECK(surface_distance(*o, a[i - 1].effector.position) <= s0.params.grasp_radius);
      }
    }
    CHECK(a.back().objects.size() == s0.objects.size() + adds - removes);
  }
}
