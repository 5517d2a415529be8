#pragma once

#include "vosa/camera.hpp"
#include "vosa/kmeans.hpp"
#include "vosa/rng.hpp"

#include <variant>
#include <vector>

namespace vosa {

struct FilterConfig {
  double z_table = 0.0;
  double table_margin = 0.005;
  Bounds bounds;  // points must lie strictly inside
};

/// Filter for a scene: workspace bounds pulled in by the margin on every
/// side so that wall returns are dropped along with the table.
FilterConfig filter_config_for(const SceneState& scene, double table_margin = 0.005);

/// Keeps points with z > z_table + margin that are strictly inside bounds. Order preserved.
PointCloud filter_cloud(const PointCloud& cloud, const FilterConfig& cfg);

struct OracleCount {};
/// Oracle count perturbed by +-U{1..max_dev} with probability p_err, floored at 0.
struct NoisyCount {
  double p_err = 0.1;
  int max_dev = 1;
};
struct FixedCount {
  int k = 0;
};
using CountEstimator = std::variant<OracleCount, NoisyCount, FixedCount>;

void validate(const CountEstimator& est);  // throws ConfigError

/// Graspable objects that own at least `min_points` of the cloud. Points are
/// attributed to the object whose surface they lie on (within `tolerance`).
int visible_object_count(const SceneState& scene, const PointCloud& cloud, int min_points = 5,
                         double tolerance = 1e-6);

int estimate_count(const SceneState& scene, const PointCloud& filtered, const CountEstimator& est, Rng& rng,
                   int min_points = 5, double tolerance = 1e-6);

struct IntentSet {
  std::vector<Vec3> intents;
  double t_updated = 0.0;
  std::vector<int> member_counts;

  bool empty() const { return intents.empty(); }
};

struct PerceptionConfig {
  CameraModel camera;
  CountEstimator estimator = OracleCount{};
  double table_margin = 0.005;
  int min_points = 5;
  int sensing_interval = 5;  // ticks between refreshes during object sensing
  KMeansOptions kmeans;
};

enum class PerceptionStatus { updated, unchanged, degraded };

struct PerceptionOutcome {
  PerceptionStatus status = PerceptionStatus::unchanged;
  IntentSet intents;  // meaningful only when status == updated
  int k = 0;
  std::size_t filtered_points = 0;
};

/// Gate, render, filter, count, cluster. `unchanged` when the camera is too
/// close to see; `degraded` when the count exceeds the available points.
PerceptionOutcome perceive_intents(const SceneState& scene, const PerceptionConfig& cfg, Rng& rng, double t);

const char* to_string(PerceptionStatus s);

}  // namespace vosa
