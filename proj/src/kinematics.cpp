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

#include "spm/kinematics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "spm/errors.hpp"

namespace spm {
namespace {

// Maps the loop frame of hinge 1 (z along servo 1, x along the common
// normal to hinge 2) onto the chassis frame, and the loop frame of hinge 3
// onto the end-effector frame (hinge-3 axis, hinge-4 axis, normal). Both
// happen to be the same permutation.
const Mat3& frame_permutation() {
  static const Mat3 p = [] {
    Mat3 m;
    m << 0, 0, 1,
         0, -1, 0,
         1, 0, 0;
    return m;
  }();
  return p;
}

Mat3 rot_x(double a) { return RotationMatrix::about_x(a).matrix(); }
Mat3 rot_z(double a) { return RotationMatrix::about_z(a).matrix(); }

std::array<double, 5> hinge_angles(const JointState& s) {
  return {s.theta[0] + kActuatedHingeOffset[0], s.theta[1] + kActuatedHingeOffset[1],
          s.theta[2], s.theta[3], s.theta[4]};
}

struct LoopEval {
  Mat3 product;
  std::array<Vec3, 5> axes;  // hinge axes in the loop start frame
};

LoopEval evaluate_loop(const JointState& s, const DesignParams& p) {
  const auto h = hinge_angles(s);
  LoopEval e;
  Mat3 m = Mat3::Identity();
  for (int i = 0; i < 5; ++i) {
    m = m * rot_z(h[i]);
    e.axes[i] = m.col(2);
    m = m * rot_x(p.alpha[i]);
  }
  e.product = m;
  return e;
}

Vec3 log_map(const Mat3& m) {
  return UnitQuaternion::from_matrix(RotationMatrix(m, 1e-8)).to_rotation_vector();
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return s;
}

// Inverse of the left Jacobian of SO(3): d log(M) = J_l^{-1}(r) * omega for a
// spatial perturbation omega of M = exp(r).
Mat3 left_jacobian_inverse(const Vec3& r) {
  const double t = r.norm();
  const Mat3 k = skew(r);
  if (t < 1e-6) return Mat3::Identity() - 0.5 * k + (1.0 / 12.0) * k * k;
  const double c = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  return Mat3::Identity() - 0.5 * k + c * k * k;
}

double condition_number(const Mat3& j) {
  const Eigen::JacobiSVD<Mat3> svd(j);
  const Vec3 sv = svd.singularValues();
  if (sv(2) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(2);
}

JointState wrap_passive(JointState s) {
  for (int i = 2; i < 5; ++i) s.theta[i] = wrap_angle(s.theta[i]);
  return s;
}

JointState newton_solve(JointState s, const DesignParams& params, const SolverOptions& opt) {
  Vec3 r = loop_closure_residual(s, params);
  double rn = r.norm();
  for (int it = 0; it < opt.max_iterations && rn > 1e-14; ++it) {
    const Mat3 j = passive_jacobian(s, params);
    const double cond = condition_number(j);
    if (!(cond <= opt.max_condition)) {
      std::ostringstream msg;
      msg << "solve_passive: Newton system condition number " << cond << " exceeds "
          << opt.max_condition;
      throw SingularStepError(msg.str());
    }
    const Vec3 step = -j.partialPivLu().solve(r);
    double scale = 1.0;
    bool improved = false;
    JointState trial = s;
    Vec3 trial_r;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      for (int k = 0; k < 3; ++k) trial.theta[2 + k] = s.theta[2 + k] + scale * step(k);
      trial_r = loop_closure_residual(trial, params);
      if (trial_r.norm() < rn) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;  // stalled, possibly at rounding level
    s = trial;
    r = trial_r;
    rn = r.norm();
  }
  if (!(rn <= opt.tolerance)) {
    std::ostringstream msg;
    msg << "solve_passive: loop-closure residual " << rn << " after Newton iterations at (theta1="
        << s.theta[0] << ", theta2=" << s.theta[1] << ")";
    throw NoConvergenceError(msg.str());
  }
  return wrap_passive(s);
}

}  // namespace

void DesignParams::validate() const {
  for (double a : alpha) {
    if (!std::isfinite(a) || a <= -kPi || a > kPi) {
      throw std::invalid_argument("DesignParams: link twist outside (-pi, pi]");
    }
  }
}

ActuatorAngles inverse_kinematics(const Vec3& n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6) {
    throw NotUnitError("inverse_kinematics: normal is not a unit vector");
  }
  if (n.z() < -1e-9) {
    throw OutOfHemisphereError("inverse_kinematics: normal below the chassis hemisphere (N_z < 0)");
  }
  if (std::abs(n.z()) < 1e-9) return {0.0, kPi / 2};
  return {std::atan(n.y() * n.z() / (n.x() * n.x() + n.z() * n.z())), std::atan2(n.x(), n.z())};
}

EndEffectorPose forward_kinematics_ideal(double theta1, double theta2) {
  if (!(std::abs(theta1) < kPi / 2) || !(theta2 > -kPi / 2 && theta2 <= kPi / 2)) {
    throw UnreachableError("forward_kinematics_ideal: servo angles outside the hemisphere chart");
  }
  // tan(theta1) = N_y cos(theta2) / sqrt(1 - N_y^2), N_x : N_z = sin : cos of theta2.
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  const double u = std::tan(theta1) / c2;
  const double r = 1.0 / std::sqrt(1.0 + u * u);
  Vec3 n(s2 * r, u * r, c2 * r);
  n.normalize();

  const ActuatorAngles back = inverse_kinematics(n);
  if (std::abs(back.theta1 - theta1) > 1e-9 || std::abs(back.theta2 - theta2) > 1e-9) {
    throw UnreachableError("forward_kinematics_ideal: no unit normal reproduces the servo angles");
  }

  const Vec3 a3(c2, 0.0, -s2);
  const Vec3 a4 = n.cross(a3).normalized();
  Mat3 m;
  m.col(0) = a3;
  m.col(1) = a4;
  m.col(2) = a3.cross(a4);
  EndEffectorPose pose;
  pose.orientation = UnitQuaternion::from_matrix(RotationMatrix(m, 1e-9));
  pose.normal = n;
  return pose;
}

Vec3 loop_closure_residual(const JointState& state, const DesignParams& params) {
  return log_map(evaluate_loop(state, params).product);
}

Mat3 passive_jacobian(const JointState& state, const DesignParams& params) {
  const LoopEval e = evaluate_loop(state, params);
  Mat3 axes;
  axes.col(0) = e.axes[2];
  axes.col(1) = e.axes[3];
  axes.col(2) = e.axes[4];
  return left_jacobian_inverse(log_map(e.product)) * axes;
}

JointState solve_passive(double theta1, double theta2, const DesignParams& params,
                         const std::optional<JointState>& guess, const SolverOptions& options) {
  params.validate();
  JointState start;
  start.theta[0] = theta1;
  start.theta[1] = theta2;
  if (guess) {
    for (int i = 2; i < 5; ++i) start.theta[i] = guess->theta[i];
  } else {
    for (int i = 0; i < 3; ++i) start.theta[2 + i] = kHomePassiveAngles[i];
  }
  try {
    return newton_solve(start, params, options);
  } catch (const Error&) {
    if (options.continuation_steps <= 0) throw;
  }
  // Walk the servo angles out from home, warm-starting each substep.
  SolverOptions inner = options;
  inner.continuation_steps = 0;
  JointState s;
  for (int i = 0; i < 3; ++i) s.theta[2 + i] = kHomePassiveAngles[i];
  const int n = options.continuation_steps;
  for (int k = 1; k <= n; ++k) {
    const double f = static_cast<double>(k) / n;
    s.theta[0] = f * theta1;
    s.theta[1] = f * theta2;
    s = newton_solve(s, params, inner);
  }
  return s;
}

EndEffectorPose end_effector_pose(const JointState& state, const DesignParams& params) {
  const auto h = hinge_angles(state);
  const Mat3& perm = frame_permutation();
  const Mat3 m = perm * rot_x(params.alpha[0]) * rot_z(h[1]) * rot_x(params.alpha[1]) * rot_z(h[2]) * perm;
  EndEffectorPose pose;
  pose.orientation = UnitQuaternion::from_matrix(RotationMatrix(m, 1e-8));
  pose.normal = pose.orientation.rotate(Vec3::UnitZ());
  return pose;
}

Mat3 inverse_jacobian(const JointState& state) {
  const double s3 = std::sin(state.theta[2]), c3 = std::cos(state.theta[2]);
  const double s4 = std::sin(state.theta[3]), c4 = std::cos(state.theta[3]);
  const double s5 = std::sin(state.theta[4]);
  if (std::abs(s5) <= 1e-9) {
    throw SingularJacobianError("inverse_jacobian: |sin theta5| <= 1e-9");
  }
  Mat3 j;
  j << -c4 / s5, -s4 / s5, 0.0,
       s3, 0.0, -c3,
       c3, 0.0, s3;
  return j;
}

BodyRates to_body_rates(const EndEffectorPose& pose, const Vec3& omega_chassis) {
  const Vec3 b = pose.orientation.to_matrix().matrix().transpose() * omega_chassis;
  return {b.z(), b.x(), b.y()};
}

ActuatorGrid ActuatorGrid::uniform(std::size_t n, double lo, double hi) {
  ActuatorGrid g;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.theta1.push_back(v);
    g.theta2.push_back(v);
  }
  return g;
}

ScanReport singularity_scan(const DesignParams& params, const ActuatorGrid& grid, unsigned workers) {
  params.validate();
  ScanReport report;
  const std::size_t rows = grid.theta1.size();
  const std::size_t cols = grid.theta2.size();
  report.points.resize(rows * cols);
  if (report.points.empty()) return report;

  auto scan_row = [&](std::size_t r) {
    std::optional<JointState> warm;
    for (std::size_t c = 0; c < cols; ++c) {
      ScanPoint& pt = report.points[r * cols + c];
      pt.theta1 = grid.theta1[r];
      pt.theta2 = grid.theta2[c];
      try {
        const JointState s = solve_passive(pt.theta1, pt.theta2, params, warm);
        pt.reachable = true;
        pt.sin_theta5 = std::sin(s.theta[4]);
        pt.condition_number = condition_number(passive_jacobian(s, params));
        warm = s;
      } catch (const Error&) {
        pt.reachable = false;
        pt.sin_theta5 = std::numeric_limits<double>::quiet_NaN();
        pt.condition_number = std::numeric_limits<double>::infinity();
        warm.reset();
      }
      pt.singular = !pt.reachable || std::abs(pt.sin_theta5) < kScanSinTheta5Threshold ||
                    pt.condition_number > kScanConditionThreshold;
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, rows));
  if (workers <= 1) {
    for (std::size_t r = 0; r < rows; ++r) scan_row(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < rows; r = next++) scan_row(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  report.min_abs_sin_theta5 = std::numeric_limits<double>::infinity();
  for (const ScanPoint& pt : report.points) {
    if (pt.singular) ++report.singular_count;
    if (!pt.reachable) continue;
    ++report.reachable_count;
    const double s = std::abs(pt.sin_theta5);
    report.min_abs_sin_theta5 = std::min(report.min_abs_sin_theta5, s);
    report.max_abs_sin_theta5 = std::max(report.max_abs_sin_theta5, s);
    report.max_condition_number = std::max(report.max_condition_number, pt.condition_number);
  }
  if (report.reachable_count == 0) report.min_abs_sin_theta5 = 0.0;
  return report;
}

void write_scan_csv(std::ostream& out, const ScanReport& report) {
  out << "theta1,theta2,sin_theta5,condition_number,reachable,singular\n";
  out << std::setprecision(9);
  for (const ScanPoint& p : report.points) {
    out << p.theta1 << ',' << p.theta2 << ',' << p.sin_theta5 << ',' << p.condition_number << ','
        << (p.reachable ? 1 : 0) << ',' << (p.singular ? 1 : 0) << '\n';
  }
}

}  // namespace spm
