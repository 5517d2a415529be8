#pragma once

#include "vosa/perception.hpp"
#include "vosa/rng.hpp"
#include "vosa/scene.hpp"

#include <random>
#include <string>
#include <vector>

namespace vosa::testing {

/// 1-4 spheres or boxes on an open table, fully inside the view of a camera
/// 0.5 m up, pairwise centre separation above 4x the larger bounding radius.
inline SceneState oracle_scene(std::uint64_t seed)
{
  Rng rng = derive_rng(seed, 0x0AC1E);
  std::uniform_int_distribution<int> count(1, 4), kind(0, 1);
  std::uniform_real_distribution<double> size(0.015, 0.03), x(-0.17, 0.17), y(-0.11, 0.11);

  SceneState s;
  s.bounds = Bounds(Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 0.8));
  s.effector.position = Vec3(0.0, 0.0, 0.5);
  s.effector.home = s.effector.position;

  const int n = count(rng);
  while (static_cast<int>(s.objects.size()) < n) {
    const double a = size(rng);
    SceneObject o;
    o.id = "o" + std::to_string(s.objects.size());
    if (kind(rng) == 0)
      o.shape = Sphere{a};
    else
      o.shape = Box{Vec3(a, a, 0.8 * a)};
    o.position = Vec3(x(rng), y(rng), half_height(o.shape));
    bool separated = true;
    for (const auto& p : s.objects) {
      const double r = std::max(bounding_radius(p.shape), bounding_radius(o.shape));
      if (horizontal_distance(p.position, o.position) <= 4.0 * r) separated = false;
    }
    if (separated) s.objects.push_back(o);
  }
  return s;
}

struct OracleCheck {
  bool bijection = false;
  double worst_ratio = 0.0;  // max centroid error / bounding radius over matched pairs
  std::string detail;
};

/// Nearest-object map from intents to true objects: must be one-to-one and
/// onto, with each error within the object's bounding radius.
inline OracleCheck check_oracle(const SceneState& s, const std::vector<Vec3>& intents)
{
  OracleCheck r;
  if (intents.size() != s.objects.size()) {
    r.detail = std::to_string(intents.size()) + " intents for " + std::to_string(s.objects.size()) + " objects";
    return r;
  }
  std::vector<int> hits(s.objects.size(), 0);
  bool within = true;
  for (const auto& g : intents) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < s.objects.size(); ++j)
      if ((s.objects[j].position - g).norm() < (s.objects[best].position - g).norm()) best = j;
    ++hits[best];
    const double ratio = (s.objects[best].position - g).norm() / bounding_radius(s.objects[best].shape);
    r.worst_ratio = std::max(r.worst_ratio, ratio);
    if (ratio > 1.0) within = false;
  }
  bool onto = true;
  for (int h : hits) onto = onto && h == 1;
  r.bijection = onto && within;
  if (!onto) r.detail = "intent map is not a bijection";
  else if (!within) r.detail = "centroid error above bounding radius";
  return r;
}

}  // namespace vosa::testing
