#include "vosa/camera.hpp"

#include "vosa/error.hpp"
#include "vosa/rng.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace vosa {

namespace {

constexpr double kRayEpsilon = 1e-12;

std::optional<double> intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r)
{
  const Vec3 oc = o - c;
  const double b = oc.dot(d);
  const double cc = oc.squaredNorm() - r * r;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t0 = -b - s;
  if (t0 > kRayEpsilon) return t0;
  const double t1 = -b + s;
  if (t1 > kRayEpsilon) return t1;
  return std::nullopt;
}

std::optional<double> intersect_box(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& h)
{
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double lo = c[i] - h[i];
    const double hi = c[i] + h[i];
    if (d[i] == 0.0) {
      if (o[i] < lo || o[i] > hi) return std::nullopt;
      continue;
    }
    double t1 = (lo - o[i]) / d[i];
    double t2 = (hi - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return std::nullopt;
  }
  if (tmin > kRayEpsilon) return tmin;
  if (tmax > kRayEpsilon) return tmax;
  return std::nullopt;
}

Vec3 pixel_direction(const CameraModel& cam, int i, int j)
{
  const double sx = std::tan(cam.fov_x / 2.0) * (2.0 * (i + 0.5) / cam.width - 1.0);
  const double sy = std::tan(cam.fov_y / 2.0) * (2.0 * (j + 0.5) / cam.height - 1.0);
  return Vec3(sx, sy, -1.0).normalized();
}

}  // namespace

void CameraModel::validate() const
{
  if (width < 2 || height < 2) throw ConfigError("camera resolution must be at least 2x2");
  if (!(min_range > 0.0 && min_range < max_range)) throw ConfigError("camera needs 0 < min_range < max_range");
  if (!(fov_x > 0.0 && fov_x < M_PI && fov_y > 0.0 && fov_y < M_PI)) throw ConfigError("camera fov out of range");
  if (!(range_noise_sigma >= 0.0)) throw ConfigError("camera noise sigma must be non-negative");
}

Vec3 camera_origin(const SceneState& scene, const CameraModel& cam)
{
  return scene.effector.position + cam.mount_offset;
}

std::optional<RayHit> cast_ray(const SceneState& scene, const Vec3& o, const Vec3& d)
{
  for (std::size_t k = 0; k < scene.objects.size(); ++k)
    if (contains(scene.objects[k], o)) return RayHit{0.0, static_cast<int>(k)};

  std::optional<RayHit> best;
  auto offer = [&](double t, int entity) {
    if (!best || t < best->range) best = RayHit{t, entity};
  };

  const Vec3 lo = scene.bounds.min();
  const Vec3 hi = scene.bounds.max();
  const double z_table = scene.params.z_table;

  if (d.z() != 0.0) {
    const double t = (z_table - o.z()) / d.z();
    if (t > kRayEpsilon) {
      const Vec3 p = o + t * d;
      if (p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y()) offer(t, kHitTable);
    }
  }

  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) continue;
    const int other = 1 - axis;
    for (double plane : {lo[axis], hi[axis]}) {
      const double t = (plane - o[axis]) / d[axis];
      if (t <= kRayEpsilon) continue;
      const Vec3 p = o + t * d;
      if (p[other] >= lo[other] && p[other] <= hi[other] && p.z() >= z_table && p.z() <= hi.z())
        offer(t, kHitWall);
    }
  }

  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const SceneObject& obj = scene.objects[k];
    std::optional<double> t;
    if (const auto* s = std::get_if<Sphere>(&obj.shape))
      t = intersect_sphere(o, d, obj.position, s->radius);
    else
      t = intersect_box(o, d, obj.position, std::get<Box>(obj.shape).half_extents);
    if (t) offer(*t, static_cast<int>(k));
  }
  return best;
}

LabeledCloud render_labeled(const SceneState& scene, const CameraModel& cam)
{
  LabeledCloud out;
  const Vec3 origin = camera_origin(scene, cam);
  out.cloud.source_pose = origin;
  out.cloud.t = scene.t;

  Rng noise(splitmix64(cam.noise_seed ^ std::bit_cast<std::uint64_t>(scene.t)));
  std::normal_distribution<double> gauss(0.0, cam.range_noise_sigma > 0.0 ? cam.range_noise_sigma : 1.0);

  for (int j = 0; j < cam.height; ++j) {
    for (int i = 0; i < cam.width; ++i) {
      const Vec3 d = pixel_direction(cam, i, j);
      const auto hit = cast_ray(scene, origin, d);
      if (!hit) continue;
      double range = hit->range;
      if (cam.range_noise_sigma > 0.0) range += gauss(noise);
      if (range < cam.min_range || range > cam.max_range) continue;
      out.cloud.points.push_back(origin + range * d);
      out.entity.push_back(hit->entity);
    }
  }
  return out;
}

PointCloud render_cloud(const SceneState& scene, const CameraModel& cam)
{
  return render_labeled(scene, cam).cloud;
}

bool sensing_allowed(const SceneState& scene, const CameraModel& cam)
{
  const auto hit = cast_ray(scene, camera_origin(scene, cam), Vec3(0.0, 0.0, -1.0));
  return !hit || hit->range >= cam.min_range;
}

void write_cloud(std::ostream& os, const PointCloud& cloud)
{
  os.precision(17);
  os << "# pose " << cloud.source_pose.x() << ' ' << cloud.source_pose.y() << ' ' << cloud.source_pose.z() << " t "
     << cloud.t << '\n';
  for (const auto& p : cloud.points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

PointCloud read_cloud(std::istream& is)
{
  PointCloud cloud;
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty cloud dump");
  {
    std::istringstream hs(line);
    std::string hash, pose, tkey;
    hs >> hash >> pose >> cloud.source_pose.x() >> cloud.source_pose.y() >> cloud.source_pose.z() >> tkey >> cloud.t;
    if (!hs || hash != "#" || pose != "pose" || tkey != "t") throw ParseError("bad cloud header: " + line);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 p;
    ls >> p.x() >> p.y() >> p.z();
    if (!ls) throw ParseError("bad cloud point: " + line);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace vosa
