#pragma once

#include "vosa/error.hpp"
#include "vosa/geometry.hpp"
#include "vosa/rng.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace vosa {

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // max centroid displacement, meters
  int restarts = 10;        // independent k-means++ seedings; lowest inertia wins
};

template <typename Scalar>
struct KMeansResult {
  std::vector<Vec3T<Scalar>> centroids;
  std::vector<int> assignment;
  std::vector<int> member_counts;
  Scalar inertia = 0;  // within-cluster sum of squares
  int iterations = 0;
  std::vector<Scalar> inertia_history;  // after every assignment step of the winning run
};

namespace detail {

template <typename Scalar>
int nearest_centroid(const Vec3T<Scalar>& p, const std::vector<Vec3T<Scalar>>& centroids, Scalar& d2_out)
{
  int best = 0;
  Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const Scalar d2 = (p - centroids[c]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  d2_out = best_d2;
  return best;
}

template <typename Scalar>
std::vector<Vec3T<Scalar>> seed_plus_plus(std::span<const Vec3T<Scalar>> points, int k, Rng& rng)
{
  std::vector<Vec3T<Scalar>> centroids;
  centroids.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  centroids.push_back(points[pick(rng)]);

  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = (points[i] - centroids[0]).squaredNorm();

  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = pick(rng);
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        r -= d2[i];
        if (r < 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min<double>(d2[i], (points[i] - centroids.back()).squaredNorm());
  }
  return centroids;
}

/// Nearest-centroid assignment; empty clusters take the worst-fit point of a
/// cluster that can spare one, so every cluster keeps at least one member.
template <typename Scalar>
Scalar assign(std::span<const Vec3T<Scalar>> points, const std::vector<Vec3T<Scalar>>& centroids,
              std::vector<int>& assignment, std::vector<int>& counts)
{
  const int k = static_cast<int>(centroids.size());
  std::vector<Scalar> d2(points.size());
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    assignment[i] = nearest_centroid(points[i], centroids, d2[i]);
    ++counts[assignment[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    std::size_t donor = points.size();
    Scalar worst = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assignment[i]] > 1 && d2[i] > worst) {
        worst = d2[i];
        donor = i;
      }
    }
    --counts[assignment[donor]];
    assignment[donor] = c;
    d2[donor] = (points[donor] - centroids[c]).squaredNorm();
    ++counts[c];
  }
  Scalar inertia = 0;
  for (Scalar v : d2) inertia += v;
  return inertia;
}

template <typename Scalar>
std::vector<Vec3T<Scalar>> means(std::span<const Vec3T<Scalar>> points, const std::vector<int>& assignment,
                                 const std::vector<int>& counts)
{
  std::vector<Vec3T<Scalar>> c(counts.size(), Vec3T<Scalar>::Zero());
  for (std::size_t i = 0; i < points.size(); ++i) c[assignment[i]] += points[i];
  for (std::size_t j = 0; j < c.size(); ++j) c[j] /= static_cast<Scalar>(counts[j]);
  return c;
}

template <typename Scalar>
KMeansResult<Scalar> lloyd(std::span<const Vec3T<Scalar>> points, std::vector<Vec3T<Scalar>> centroids,
                           const KMeansOptions& opt)
{
  KMeansResult<Scalar> r;
  r.assignment.resize(points.size());
  for (r.iterations = 1; r.iterations <= opt.max_iterations; ++r.iterations) {
    r.inertia_history.push_back(assign(points, centroids, r.assignment, r.member_counts));
    auto updated = means(points, r.assignment, r.member_counts);
    Scalar shift = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) shift = std::max(shift, (updated[c] - centroids[c]).norm());
    centroids = std::move(updated);
    if (shift < static_cast<Scalar>(opt.tolerance)) break;
  }
  r.iterations = std::min(r.iterations, opt.max_iterations);
  r.centroids = std::move(centroids);
  r.inertia = 0;
  for (std::size_t i = 0; i < points.size(); ++i) r.inertia += (points[i] - r.centroids[r.assignment[i]]).squaredNorm();
  return r;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding. Deterministic in (points, k, seed).
/// Each returned centroid is the mean of the points assigned to it.
template <typename Scalar>
KMeansResult<Scalar> kmeans(std::span<const Vec3T<Scalar>> points, int k, std::uint64_t seed,
                            const KMeansOptions& opt = {})
{
  if (k < 0) throw ContractViolation("k-means with negative k");
  KMeansResult<Scalar> best;
  if (k == 0) return best;
  if (points.size() < static_cast<std::size_t>(k)) throw InsufficientPoints(points.size(), k);

  bool have = false;
  for (int run = 0; run < std::max(1, opt.restarts); ++run) {
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(run));
    auto r = detail::lloyd(points, detail::seed_plus_plus(points, k, rng), opt);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

template <typename Scalar>
KMeansResult<Scalar> kmeans(const std::vector<Vec3T<Scalar>>& points, int k, std::uint64_t seed,
                            const KMeansOptions& opt = {})
{
  return kmeans(std::span<const Vec3T<Scalar>>(points), k, seed, opt);
}

}  // namespace vosa
