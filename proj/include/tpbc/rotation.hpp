#pragma once

#include <cmath>

#include "tpbc/core.hpp"

namespace tpbc {

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

// Rotation about a unit axis (Rodrigues).
inline Mat3 axis_rotation(const Vec3& axis, double angle) {
  const Mat3 k = skew(axis);
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

// Extrinsic x-y-z roll-pitch-yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 rpy_to_matrix(const Vec3& rpy) {
  const double cr = std::cos(rpy.x()), sr = std::sin(rpy.x());
  const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Mat3 r;
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,  //
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,   //
      -sp, cp * sr, cp * cr;
  return r;
}

constexpr double kEulerSingularityTol = 1e-6;

// Inverse of rpy_to_matrix. Throws when pitch is within kEulerSingularityTol
// of +-pi/2, where roll and yaw are no longer separable.
inline Vec3 matrix_to_rpy(const Mat3& r) {
  const double sp = -r(2, 0);
  // hypot(r21, r22) = |cos(pitch)|
  if (std::hypot(r(2, 1), r(2, 2)) < kEulerSingularityTol) {
    throw EulerSingularityError("matrix_to_rpy: pitch at +-pi/2 (gimbal lock)");
  }
  const double pitch = std::asin(std::clamp(sp, -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

// World angular velocity from rpy rates: w = E(rpy) * rpy_dot.
inline Mat3 rpy_rate_matrix(const Vec3& rpy) {
  const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Mat3 e;
  e << cp * cy, -sy, 0.0,  //
      cp * sy, cy, 0.0,    //
      -sp, 0.0, 1.0;
  return e;
}

// rpy_dot = E^-1(rpy) * w. det(E) = cos(pitch), hence the same gimbal guard.
inline Mat3 rpy_rate_matrix_inverse(const Vec3& rpy) {
  const double cp = std::cos(rpy.y());
  if (std::abs(cp) < kEulerSingularityTol) {
    throw EulerSingularityError("rpy_rate_matrix_inverse: pitch at +-pi/2 (gimbal lock)");
  }
  const double sp = std::sin(rpy.y());
  const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
  Mat3 inv;
  inv << cy / cp, sy / cp, 0.0,           //
      -sy, cy, 0.0,                       //
      cy * sp / cp, sy * sp / cp, 1.0;
  return inv;
}

}  // namespace tpbc
