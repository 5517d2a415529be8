#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace vosa {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using BoxT = Eigen::AlignedBox<Scalar, 3>;

using Vec3 = Vec3T<double>;
using Bounds = BoxT<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v)
{
  return v.allFinite();
}

/// Projects `v` onto the closed unit ball.
template <typename Derived>
Vec3T<typename Derived::Scalar> clamp_unit(const Eigen::MatrixBase<Derived>& v)
{
  using Scalar = typename Derived::Scalar;
  const Scalar n = v.norm();
  if (n > Scalar(1)) return v / n;
  return v;
}

template <typename Scalar>
Vec3T<Scalar> clamp_to(const BoxT<Scalar>& box, const Vec3T<Scalar>& p)
{
  return p.cwiseMax(box.min()).cwiseMin(box.max());
}

/// Strict interior test; points on a face are outside.
template <typename Scalar>
bool strictly_inside(const BoxT<Scalar>& box, const Vec3T<Scalar>& p)
{
  return (p.array() > box.min().array()).all() && (p.array() < box.max().array()).all();
}

template <typename Scalar>
Scalar horizontal_distance(const Vec3T<Scalar>& a, const Vec3T<Scalar>& b)
{
  return (a.template head<2>() - b.template head<2>()).norm();
}

/// Angle between two vectors in [0, pi]; zero vectors give pi.
template <typename Scalar>
Scalar angle_between(const Vec3T<Scalar>& a, const Vec3T<Scalar>& b)
{
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(M_PI);
  Scalar c = a.dot(b) / (na * nb);
  c = std::max(Scalar(-1), std::min(Scalar(1), c));
  return std::acos(c);
}

}  // namespace vosa
