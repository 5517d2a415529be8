#pragma once

#include "vosa/geometry.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace vosa {

template <typename Scalar>
struct ConfidenceWeightsT {
  Scalar w1 = Scalar(0.3);  // agreement between human and robot commands
  Scalar w2 = Scalar(0.7);  // proximity to the intent
  Scalar distance_scale = Scalar(1);  // meters; proximity term is exp(-d / scale)
};
using ConfidenceWeights = ConfidenceWeightsT<double>;

/// Distances at or below this leave the robot action undefined; the step is zero.
inline constexpr double kDegenerateDistance = 1e-6;

/// Unit step from `x` toward `g`, or zero when they coincide.
template <typename Scalar>
Vec3T<Scalar> intent_direction(const Vec3T<Scalar>& x, const Vec3T<Scalar>& g,
                               Scalar degenerate = Scalar(kDegenerateDistance))
{
  const Vec3T<Scalar> delta = g - x;
  const Scalar n = delta.norm();
  if (n <= degenerate) return Vec3T<Scalar>::Zero();
  return delta / n;
}

/// w1 * (u_h . u_rg) + w2 * exp(-d). The human command is clamped to the
/// unit ball first.
template <typename Scalar>
Scalar confidence(const Vec3T<Scalar>& u_h, const Vec3T<Scalar>& u_rg, Scalar d, const ConfidenceWeightsT<Scalar>& w)
{
  return w.w1 * clamp_unit(u_h).dot(u_rg) + w.w2 * std::exp(-d / w.distance_scale);
}

template <typename Scalar>
struct IntentScoreT {
  Vec3T<Scalar> direction;
  Scalar distance;
  Scalar confidence;
};

template <typename Scalar>
struct PredictionT {
  std::optional<std::size_t> selected;
  Vec3T<Scalar> u_r = Vec3T<Scalar>::Zero();
  Scalar c = -std::numeric_limits<Scalar>::infinity();  // -inf: nothing to assist toward
  std::vector<IntentScoreT<Scalar>> per_intent;
};
using Prediction = PredictionT<double>;

/// Scores every intent and selects the most confident one. Ties go to the
/// nearer intent, then to the lower index.
template <typename Scalar>
PredictionT<Scalar> predict(const Vec3T<Scalar>& u_h, const Vec3T<Scalar>& x, std::span<const Vec3T<Scalar>> intents,
                            const ConfidenceWeightsT<Scalar>& w)
{
  PredictionT<Scalar> p;
  p.per_intent.reserve(intents.size());
  for (std::size_t i = 0; i < intents.size(); ++i) {
    IntentScoreT<Scalar> s;
    s.direction = intent_direction<Scalar>(x, intents[i]);
    s.distance = (intents[i] - x).norm();
    s.confidence = confidence<Scalar>(u_h, s.direction, s.distance, w);
    p.per_intent.push_back(s);

    if (!p.selected) {
      p.selected = i;
      continue;
    }
    const auto& best = p.per_intent[*p.selected];
    if (s.confidence > best.confidence || (s.confidence == best.confidence && s.distance < best.distance))
      p.selected = i;
  }
  if (p.selected) {
    p.u_r = p.per_intent[*p.selected].direction;
    p.c = p.per_intent[*p.selected].confidence;
  }
  return p;
}

template <typename Scalar>
PredictionT<Scalar> predict(const Vec3T<Scalar>& u_h, const Vec3T<Scalar>& x, const std::vector<Vec3T<Scalar>>& intents,
                            const ConfidenceWeightsT<Scalar>& w)
{
  return predict<Scalar>(u_h, x, std::span<const Vec3T<Scalar>>(intents), w);
}

}  // namespace vosa
