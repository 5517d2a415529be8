#include "vosa/perception.hpp"

#include "vosa/error.hpp"

#include <algorithm>
#include <limits>

namespace vosa {

FilterConfig filter_config_for(const SceneState& scene, double table_margin)
{
  FilterConfig cfg;
  cfg.z_table = scene.params.z_table;
  cfg.table_margin = table_margin;
  const Vec3 inset(table_margin, table_margin, 0.0);
  cfg.bounds = Bounds(scene.bounds.min() + inset, scene.bounds.max() - inset);
  return cfg;
}

PointCloud filter_cloud(const PointCloud& cloud, const FilterConfig& cfg)
{
  PointCloud out;
  out.source_pose = cloud.source_pose;
  out.t = cloud.t;
  const double floor = cfg.z_table + cfg.table_margin;
  for (const auto& p : cloud.points)
    if (p.z() > floor && strictly_inside(cfg.bounds, p)) out.points.push_back(p);
  return out;
}

void validate(const CountEstimator& est)
{
  if (const auto* n = std::get_if<NoisyCount>(&est)) {
    if (!(n->p_err >= 0.0 && n->p_err <= 1.0)) throw ConfigError("noisy count p_err must lie in [0,1]");
    if (n->max_dev < 1) throw ConfigError("noisy count max_dev must be >= 1");
  } else if (const auto* f = std::get_if<FixedCount>(&est)) {
    if (f->k < 0) throw ConfigError("fixed count k must be >= 0");
  }
}

int visible_object_count(const SceneState& scene, const PointCloud& cloud, int min_points, double tolerance)
{
  std::vector<int> owned(scene.objects.size(), 0);
  for (const auto& p : cloud.points) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      const double d = distance_to_boundary(scene.objects[k], p);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    if (best >= 0 && best_d <= tolerance) ++owned[best];
  }
  int count = 0;
  for (std::size_t k = 0; k < scene.objects.size(); ++k)
    if (scene.objects[k].graspable && owned[k] >= min_points) ++count;
  return count;
}

int estimate_count(const SceneState& scene, const PointCloud& filtered, const CountEstimator& est, Rng& rng,
                   int min_points, double tolerance)
{
  if (const auto* f = std::get_if<FixedCount>(&est)) return f->k;
  const int truth = visible_object_count(scene, filtered, min_points, tolerance);
  if (const auto* n = std::get_if<NoisyCount>(&est)) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < n->p_err) {
      std::uniform_int_distribution<int> dev(1, n->max_dev);
      const int magnitude = dev(rng);
      const int sign = coin(rng) < 0.5 ? -1 : 1;
      return std::max(0, truth + sign * magnitude);
    }
  }
  return truth;
}

PerceptionOutcome perceive_intents(const SceneState& scene, const PerceptionConfig& cfg, Rng& rng, double t)
{
  PerceptionOutcome out;
  if (!sensing_allowed(scene, cfg.camera)) return out;

  const PointCloud filtered = filter_cloud(render_cloud(scene, cfg.camera), filter_config_for(scene, cfg.table_margin));
  out.filtered_points = filtered.points.size();

  // Noisy ranges push points off the exact surfaces.
  const double tolerance = 1e-6 + 4.0 * cfg.camera.range_noise_sigma;
  out.k = filtered.points.empty() ? 0 : estimate_count(scene, filtered, cfg.estimator, rng, cfg.min_points, tolerance);

  out.status = PerceptionStatus::updated;
  out.intents.t_updated = t;
  if (out.k == 0) return out;

  try {
    const auto clusters = kmeans<double>(filtered.points, out.k, rng(), cfg.kmeans);
    out.intents.intents = clusters.centroids;
    out.intents.member_counts = clusters.member_counts;
  } catch (const InsufficientPoints&) {
    out.status = PerceptionStatus::degraded;
    out.intents = {};
  }
  return out;
}

const char* to_string(PerceptionStatus s)
{
  switch (s) {
    case PerceptionStatus::updated: return "updated";
    case PerceptionStatus::unchanged: return "unchanged";
    case PerceptionStatus::degraded: return "degraded";
  }
  return "?";
}

}  // namespace vosa
