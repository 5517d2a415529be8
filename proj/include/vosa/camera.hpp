#pragma once

#include "vosa/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace vosa {

/// Eye-in-hand depth camera looking along -z from the effector.
struct CameraModel {
  int width = 64;
  int height = 48;
  double fov_x = 69.0 * M_PI / 180.0;
  double fov_y = 42.0 * M_PI / 180.0;
  double min_range = 0.28;
  double max_range = 3.0;
  Vec3 mount_offset = Vec3::Zero();
  double range_noise_sigma = 0.0;  // zero-mean Gaussian range noise
  std::uint64_t noise_seed = 0;

  void validate() const;  // throws ConfigError
};

struct PointCloud {
  std::vector<Vec3> points;
  Vec3 source_pose = Vec3::Zero();
  double t = 0.0;
};

/// Surface a ray hit: an index into SceneState::objects, or one of the
/// static entities below.
enum : int { kHitTable = -1, kHitWall = -2 };

struct LabeledCloud {
  PointCloud cloud;
  std::vector<int> entity;  // parallel to cloud.points
};

Vec3 camera_origin(const SceneState& scene, const CameraModel& cam);

/// Nearest intersection along a ray (unit `dir`) against table, walls and
/// objects; nullopt on a miss. An origin inside an object reports range 0.
struct RayHit {
  double range;
  int entity;
};
std::optional<RayHit> cast_ray(const SceneState& scene, const Vec3& origin, const Vec3& dir);

LabeledCloud render_labeled(const SceneState& scene, const CameraModel& cam);
PointCloud render_cloud(const SceneState& scene, const CameraModel& cam);

/// True iff the nearest surface on the optical axis is at least `min_range` away.
bool sensing_allowed(const SceneState& scene, const CameraModel& cam);

/// Text dump: "# pose x y z t T" header, then one "x y z" line per point.
void write_cloud(std::ostream& os, const PointCloud& cloud);
PointCloud read_cloud(std::istream& is);

}  // namespace vosa
