// Copyright 2026 The SPM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rotation algebra shared by the whole pipeline: unit quaternions with a
// canonical sign, rotation matrices and Z-Y-X Euler angles.
//
// All types are immutable values. Every operation that produces a quaternion
// renormalizes and canonicalizes its result, so the invariants below can be
// checked locally after any call:
//   - w^2 + x^2 + y^2 + z^2 == 1 (to rounding)
//   - w >= 0, and if w == 0 the first nonzero of (x, y, z) is positive.

#pragma once

#include <array>

#include <Eigen/Dense>

namespace spm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class RotationMatrix;

class UnitQuaternion {
 public:
  /// Identity rotation.
  UnitQuaternion() = default;

  /// Normalizes and canonicalizes. Throws std::invalid_argument when the
  /// input is not finite or has (near) zero norm.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }

  /// Rotation of `angle` radians about `axis` (need not be unit length).
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

  /// Exponential map: rotation vector (axis * angle) to quaternion.
  static UnitQuaternion from_rotation_vector(const Vec3& rotation_vector);

  static UnitQuaternion from_matrix(const RotationMatrix& m);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::array<double, 4> wxyz() const { return {w_, x_, y_, z_}; }

  UnitQuaternion conjugate() const;

  /// Logarithm map, angle in [0, pi].
  Vec3 to_rotation_vector() const;

  RotationMatrix to_matrix() const;

  Vec3 rotate(const Vec3& v) const;

  friend bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Proper rotation matrix. Construction from an arbitrary matrix validates
/// orthonormality and det = +1 within `tolerance`.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}
  explicit RotationMatrix(const Mat3& m, double tolerance = 1e-10);

  static RotationMatrix about_x(double angle);
  static RotationMatrix about_y(double angle);
  static RotationMatrix about_z(double angle);

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }
  Vec3 column(int c) const { return m_.col(c); }

  RotationMatrix transpose() const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  RotationMatrix operator*(const RotationMatrix& o) const;

  /// True when columns are orthonormal and det = +1 within `tolerance`.
  static bool is_rotation(const Mat3& m, double tolerance);

 private:
  struct Unchecked {};
  RotationMatrix(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;
};

/// Intrinsic Z-Y-X angles: R = Rz(phi) * Ry(psi) * Rx(theta).
/// phi (yaw) and theta (roll) lie in (-pi, pi]; psi (pitch) in [-pi/2, pi/2].
struct EulerAngles {
  double phi = 0.0;
  double psi = 0.0;
  double theta = 0.0;
};

/// Pitch within this distance of +-pi/2 is treated as gimbal lock.
inline constexpr double kGimbalLockThreshold = 1e-6;

/// Hamilton product a (x) b: apply b first, then a.
UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b);

/// Returns q01 such that quat_compose(q0, q01) == q1.
UnitQuaternion relative_rotation(const UnitQuaternion& q0, const UnitQuaternion& q1);

EulerAngles quat_to_euler(const UnitQuaternion& q);
UnitQuaternion euler_to_quat(const EulerAngles& e);

/// Geodesic angle between two orientations, in [0, pi]. Insensitive to the
/// sign of either argument.
double quat_angle_error(const UnitQuaternion& a, const UnitQuaternion& b);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace spm
