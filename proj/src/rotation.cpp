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

#include "spm/rotation.hpp"

#include <cmath>
#include <stdexcept>

namespace spm {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n < 1e-300) {
    throw std::invalid_argument("UnitQuaternion: non-finite or zero-norm input");
  }
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  bool flip = w < 0.0;
  if (w == 0.0) {
    const double first = x != 0.0 ? x : (y != 0.0 ? y : z);
    flip = first < 0.0;
  }
  const double s = flip ? -1.0 : 1.0;
  // +0.0 keeps a negated zero from printing as -0.
  w_ = s * w + 0.0;
  x_ = s * x + 0.0;
  y_ = s * y + 0.0;
  z_ = s * z + 0.0;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("from_axis_angle: zero axis");
  const Vec3 u = axis / n;
  const double s = std::sin(0.5 * angle);
  return {std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z()};
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-12) {
    return {1.0, 0.5 * rv.x(), 0.5 * rv.y(), 0.5 * rv.z()};
  }
  const double s = std::sin(0.5 * angle) / angle;
  return {std::cos(0.5 * angle), s * rv.x(), s * rv.y(), s * rv.z()};
}

UnitQuaternion UnitQuaternion::from_matrix(const RotationMatrix& rm) {
  const Mat3& m = rm.matrix();
  const double tr = m.trace();
  // Shepperd: pivot on the largest of (w, x, y, z).
  if (tr >= m(0, 0) && tr >= m(1, 1) && tr >= m(2, 2)) {
    const double r = std::sqrt(1.0 + tr);
    const double s = 0.5 / r;
    return {0.5 * r, (m(2, 1) - m(1, 2)) * s, (m(0, 2) - m(2, 0)) * s, (m(1, 0) - m(0, 1)) * s};
  }
  if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
    const double r = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    const double s = 0.5 / r;
    return {(m(2, 1) - m(1, 2)) * s, 0.5 * r, (m(0, 1) + m(1, 0)) * s, (m(0, 2) + m(2, 0)) * s};
  }
  if (m(1, 1) >= m(2, 2)) {
    const double r = std::sqrt(1.0 - m(0, 0) + m(1, 1) - m(2, 2));
    const double s = 0.5 / r;
    return {(m(0, 2) - m(2, 0)) * s, (m(0, 1) + m(1, 0)) * s, 0.5 * r, (m(1, 2) + m(2, 1)) * s};
  }
  const double r = std::sqrt(1.0 - m(0, 0) - m(1, 1) + m(2, 2));
  const double s = 0.5 / r;
  return {(m(1, 0) - m(0, 1)) * s, (m(0, 2) + m(2, 0)) * s, (m(1, 2) + m(2, 1)) * s, 0.5 * r};
}

UnitQuaternion UnitQuaternion::conjugate() const { return {w_, -x_, -y_, -z_}; }

Vec3 UnitQuaternion::to_rotation_vector() const {
  const Vec3 v(x_, y_, z_);
  const double s = v.norm();
  if (s < 1e-12) return v * (2.0 / w_);
  return v * (2.0 * std::atan2(s, w_) / s);
}

RotationMatrix UnitQuaternion::to_matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  Mat3 m;
  m << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
       2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
       2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return RotationMatrix(m, 1e-9);
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

RotationMatrix::RotationMatrix(const Mat3& m, double tolerance) : m_(m) {
  if (!is_rotation(m, tolerance)) {
    throw std::invalid_argument("RotationMatrix: input is not a proper rotation");
  }
}

bool RotationMatrix::is_rotation(const Mat3& m, double tolerance) {
  if (!m.allFinite()) return false;
  const Mat3 e = m.transpose() * m - Mat3::Identity();
  return e.cwiseAbs().maxCoeff() <= tolerance && std::abs(m.determinant() - 1.0) <= tolerance;
}

RotationMatrix RotationMatrix::about_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return {m, Unchecked{}};
}

RotationMatrix RotationMatrix::about_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return {m, Unchecked{}};
}

RotationMatrix RotationMatrix::about_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return {m, Unchecked{}};
}

RotationMatrix RotationMatrix::transpose() const { return {m_.transpose(), Unchecked{}}; }

RotationMatrix RotationMatrix::operator*(const RotationMatrix& o) const {
  return {m_ * o.m_, Unchecked{}};
}

UnitQuaternion quat_compose(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
          a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
          a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
          a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w()};
}

UnitQuaternion relative_rotation(const UnitQuaternion& q0, const UnitQuaternion& q1) {
  return quat_compose(q0.conjugate(), q1);
}

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

EulerAngles quat_to_euler(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  // Matrix entries of R = Rz(phi) Ry(psi) Rx(theta) expressed in q.
  const double r20 = 2.0 * (x * z - w * y);
  const double r21 = 2.0 * (y * z + w * x);
  const double r22 = 1.0 - 2.0 * (x * x + y * y);
  const double r10 = 2.0 * (x * y + w * z);
  const double r00 = 1.0 - 2.0 * (y * y + z * z);

  EulerAngles e;
  e.psi = std::atan2(-r20, std::hypot(r21, r22));
  if (kPi / 2 - std::abs(e.psi) <= kGimbalLockThreshold) {
    // Only phi -+ theta is observable; put all of it into phi.
    const double r01 = 2.0 * (x * y - w * z);
    const double r11 = 1.0 - 2.0 * (x * x + z * z);
    e.phi = wrap_angle(std::atan2(-r01, r11));
    e.theta = 0.0;
    return e;
  }
  e.phi = wrap_angle(std::atan2(r10, r00));
  e.theta = wrap_angle(std::atan2(r21, r22));
  return e;
}

UnitQuaternion euler_to_quat(const EulerAngles& e) {
  const UnitQuaternion qz(std::cos(0.5 * e.phi), 0.0, 0.0, std::sin(0.5 * e.phi));
  const UnitQuaternion qy(std::cos(0.5 * e.psi), 0.0, std::sin(0.5 * e.psi), 0.0);
  const UnitQuaternion qx(std::cos(0.5 * e.theta), std::sin(0.5 * e.theta), 0.0, 0.0);
  return quat_compose(qz, quat_compose(qy, qx));
}

double quat_angle_error(const UnitQuaternion& a, const UnitQuaternion& b) {
  const UnitQuaternion d = relative_rotation(a, b);
  const double s = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
  return 2.0 * std::atan2(s, std::abs(d.w()));
}

}  // namespace spm
