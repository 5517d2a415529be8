#pragma once

#include "vosa/error.hpp"
#include "vosa/geometry.hpp"

#include <optional>

namespace vosa {

/// Deadzone, linear ramp, plateau at alpha_max.
template <typename Scalar>
struct ArbitrationCurveT {
  Scalar c_lo = Scalar(0.4);
  Scalar c_hi = Scalar(0.9);
  Scalar alpha_max = Scalar(0.8);

  void validate() const
  {
    if (!(c_lo >= Scalar(0) && c_lo < c_hi)) throw ConfigError("arbitration curve needs 0 <= c_lo < c_hi");
    if (!(alpha_max >= Scalar(0) && alpha_max <= Scalar(1)))
      throw ConfigError("arbitration alpha_max must lie in [0,1]");
  }
};
using ArbitrationCurve = ArbitrationCurveT<double>;

template <typename Scalar>
Scalar alpha_of(Scalar c, const ArbitrationCurveT<Scalar>& curve)
{
  if (!(c > curve.c_lo)) return Scalar(0);  // also catches -inf and NaN
  if (c >= curve.c_hi) return curve.alpha_max;
  return curve.alpha_max * (c - curve.c_lo) / (curve.c_hi - curve.c_lo);
}

/// (1 - alpha) * u_h + alpha * u_r. Throws ContractViolation for alpha outside [0, 1].
template <typename Scalar>
Vec3T<Scalar> blend(const Vec3T<Scalar>& u_h, const Vec3T<Scalar>& u_r, Scalar alpha)
{
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) throw ContractViolation("blend alpha outside [0,1]");
  return (Scalar(1) - alpha) * u_h + alpha * u_r;
}

struct BlendState {
  Vec3 u_h = Vec3::Zero();
  Vec3 u_r = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  double c = 0.0;
  double alpha = 0.0;
  std::optional<std::size_t> selected_intent;
  double t = 0.0;
};

}  // namespace vosa
