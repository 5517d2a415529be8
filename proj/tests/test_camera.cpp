#include "vosa/camera.hpp"
#include "vosa/error.hpp"
#include "vosa/rng.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

using namespace vosa;

namespace {

SceneState open_table(double camera_height)
{
  SceneState s;
  s.bounds = Bounds(Vec3(-1.0, -1.0, 0.0), Vec3(1.0, 1.0, 1.0));
  s.effector.position = Vec3(0.0, 0.0, camera_height);
  s.effector.home = s.effector.position;
  return s;
}

double distance_to_bounds_face(const Bounds& b, const Vec3& p)
{
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) d = std::min({d, std::abs(p[i] - b.min()[i]), std::abs(p[i] - b.max()[i])});
  return d;
}

double distance_to_any_surface(const SceneState& s, const Vec3& p)
{
  double d = std::min(std::abs(p.z() - s.params.z_table), distance_to_bounds_face(s.bounds, p));
  for (const auto& o : s.objects) d = std::min(d, distance_to_boundary(o, p));
  return d;
}

std::map<int, int> counts_by_entity(const LabeledCloud& c)
{
  std::map<int, int> m;
  for (int e : c.entity) ++m[e];
  return m;
}

}  // namespace

TEST_CASE("bare table seen from 0.5 m is flat")
{
  const SceneState s = open_table(0.5);
  const PointCloud c = render_cloud(s, CameraModel{});
  CHECK(c.points.size() == 64u * 48u);
  for (const auto& p : c.points) CHECK(std::abs(p.z()) <= 1e-9);
}

TEST_CASE("points on a sphere lie on its surface")
{
  SceneState s = open_table(0.5);
  const Vec3 c(0.02, -0.01, 0.05);
  const double r = 0.05;
  s.objects.push_back({"s", Sphere{r}, c, true});
  const LabeledCloud lc = render_labeled(s, CameraModel{});
  int on_sphere = 0;
  for (std::size_t i = 0; i < lc.cloud.points.size(); ++i) {
    if (lc.entity[i] == kHitTable) continue;
    REQUIRE(lc.entity[i] == 0);
    CHECK(std::abs((lc.cloud.points[i] - c).norm() - r) <= 1e-9);
    ++on_sphere;
  }
  CHECK(on_sphere > 5);
}

TEST_CASE("near clip drops objects closer than min_range")
{
  SceneState s = open_table(0.2);
  // Top of the box is 0.1 m below the camera.
  s.objects.push_back({"b", Box{Vec3(0.03, 0.03, 0.05)}, Vec3(0.0, 0.0, 0.05), true});
  CameraModel cam;
  cam.min_range = 0.28;
  const LabeledCloud lc = render_labeled(s, cam);
  for (int e : lc.entity) CHECK(e != 0);
}

TEST_CASE("sensing gate")
{
  CameraModel cam;
  SUBCASE("home, 0.6 m over the table") { CHECK(sensing_allowed(open_table(0.6), cam)); }
  SUBCASE("empty scene, table at 0.5 m") { CHECK(sensing_allowed(open_table(0.5), cam)); }
  SUBCASE("0.05 m over an object top")
  {
    SceneState s = open_table(0.11);
    s.objects.push_back({"s", Sphere{0.03}, Vec3(0.0, 0.0, 0.03), true});
    CHECK_FALSE(sensing_allowed(s, cam));
  }
}

TEST_CASE("camera validation")
{
  CameraModel cam;
  cam.width = 0;
  CHECK_THROWS_AS(cam.validate(), ConfigError);
  cam = CameraModel{};
  cam.min_range = 4.0;
  CHECK_THROWS_AS(cam.validate(), ConfigError);
  cam = CameraModel{};
  cam.fov_x = M_PI;
  CHECK_THROWS_AS(cam.validate(), ConfigError);
}

TEST_CASE("cloud text dump round-trips")
{
  SceneState s = open_table(0.4);
  s.objects.push_back({"s", Sphere{0.03}, Vec3(0.05, 0.0, 0.03), true});
  const PointCloud c = render_cloud(s, CameraModel{});
  std::stringstream ss;
  write_cloud(ss, c);
  const PointCloud r = read_cloud(ss);
  REQUIRE(r.points.size() == c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) CHECK(r.points[i] == c.points[i]);
  CHECK(r.source_pose == c.source_pose);
}

TEST_CASE("property: every point is on a surface, rendering is pure, occlusion is monotone")
{
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng = derive_rng(seed, 7);
    std::uniform_real_distribution<double> xy(-0.15, 0.15), size(0.015, 0.04), h(0.3, 0.6);
    std::uniform_int_distribution<int> n(0, 4), kind(0, 1);

    SceneState s = open_table(h(rng));
    s.bounds = Bounds(Vec3(-0.3, -0.3, 0.0), Vec3(0.3, 0.3, 0.8));
    const int count = n(rng);
    for (int i = 0; i < count; ++i) {
      const double r = size(rng);
      if (kind(rng) == 0)
        s.objects.push_back({"o" + std::to_string(i), Sphere{r}, Vec3(xy(rng), xy(rng), r), true});
      else
        s.objects.push_back({"o" + std::to_string(i), Box{Vec3(r, r, 0.8 * r)}, Vec3(xy(rng), xy(rng), 0.8 * r), true});
    }
    s.effector.position.head<2>() = Vec3(xy(rng), xy(rng), 0.0).head<2>();

    CameraModel cam;
    cam.min_range = 0.05;
    const LabeledCloud a = render_labeled(s, cam);
    const LabeledCloud b = render_labeled(s, cam);
    REQUIRE(a.cloud.points == b.cloud.points);
    REQUIRE(a.entity == b.entity);
    for (const auto& p : a.cloud.points) CHECK(distance_to_any_surface(s, p) <= 1e-6);

    SceneState more = s;
    more.objects.push_back({"extra", Sphere{0.04}, Vec3(xy(rng), xy(rng), 0.04), true});
    const auto before = counts_by_entity(a);
    const auto after = counts_by_entity(render_labeled(more, cam));
    for (const auto& [entity, k] : before) {
      auto it = after.find(entity);
      CHECK((it == after.end() ? 0 : it->second) <= k);
    }
  }
}

TEST_CASE("range noise is reproducible from its seed")
{
  SceneState s = open_table(0.4);
  CameraModel cam;
  cam.range_noise_sigma = 0.002;
  cam.noise_seed = 11;
  const PointCloud a = render_cloud(s, cam);
  const PointCloud b = render_cloud(s, cam);
  CHECK(a.points == b.points);
  cam.noise_seed = 12;
  CHECK(render_cloud(s, cam).points != a.points);
  double spread = 0.0;
  for (const auto& p : a.points) spread = std::max(spread, std::abs(p.z()));
  CHECK(spread > 0.0);
  CHECK(spread < 0.05);
}
