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

// Kinematics of the 2-DOF spherical 5R parallel linkage.
//
// Loop convention. Hinges are numbered consecutively around the loop; link i
// sits between hinge i and hinge i+1 and carries twist alpha_i. The loop
// closes when
//
//     prod_{i=1..5} Rz(h_i) * Rx(alpha_i) == I
//
// where h_i is the hinge angle. Link 1 is the grounded chassis, so hinges 1
// and 2 are the actuated ones. Link 3 is the end-effector.
//
// Chassis frame. Servo 1 turns about +x, servo 2 about +y. At the home pose
// (both servo angles zero) the end-effector frame coincides with the chassis
// frame and its normal N points along +z.
//
// Servo angles vs. hinge angles. JointState stores the actuated entries as
// servo angles (zero at home) and the passive entries as raw hinge angles.
// The actuated hinge angles are h_1 = theta_1 + pi/2 and h_2 = theta_2 + pi,
// see kActuatedHingeOffset. At home the passive hinges sit at
// (pi, pi/2, pi/2).

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "spm/rotation.hpp"

namespace spm {

/// Link twist angles alpha_1..alpha_5 in radians. alpha_1 is the chassis.
struct DesignParams {
  std::array<double, 5> alpha{kPi / 2, kPi / 2, kPi / 2, kPi / 2, kPi / 2};

  static DesignParams nominal() { return {}; }
  /// Throws std::invalid_argument when an entry is outside (-pi, pi].
  void validate() const;
};

/// theta[0], theta[1]: servo angles. theta[2..4]: passive hinge angles.
struct JointState {
  std::array<double, 5> theta{};

  double theta1() const { return theta[0]; }
  double theta2() const { return theta[1]; }
};

struct ActuatorAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct EndEffectorPose {
  Vec3 normal = Vec3::UnitZ();
  UnitQuaternion orientation;
};

/// End-effector angular velocity in the Jacobian frame: components along
/// the end-effector normal N, the hinge-3 axis and the hinge-4 axis.
struct BodyRates {
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_z = 0.0;
};

inline constexpr std::array<double, 2> kActuatedHingeOffset{kPi / 2, kPi};
inline constexpr std::array<double, 3> kHomePassiveAngles{kPi, kPi / 2, kPi / 2};

/// Closed-form inverse kinematics of the nominal design.
///
///   theta1 = atan(N_y N_z / (N_x^2 + N_z^2)),   theta2 = atan2(N_x, N_z)
///
/// For |N_z| < 1e-9 the result is (0, pi/2). Throws NotUnitError when
/// |‖N‖ - 1| > 1e-6 and OutOfHemisphereError when N_z < -1e-9.
ActuatorAngles inverse_kinematics(const Vec3& normal);

/// Closed-form forward kinematics of the nominal design on the chart
/// theta1 in (-pi/2, pi/2), theta2 in (-pi/2, pi/2]. Throws UnreachableError
/// outside it.
EndEffectorPose forward_kinematics_ideal(double theta1, double theta2);

/// Rotation vector of the loop product's defect from identity.
Vec3 loop_closure_residual(const JointState& state, const DesignParams& params);

/// Partial derivatives of loop_closure_residual with respect to the passive
/// hinges (columns theta3, theta4, theta5).
Mat3 passive_jacobian(const JointState& state, const DesignParams& params);

struct SolverOptions {
  int max_iterations = 50;
  int max_halvings = 8;
  double tolerance = 1e-8;
  double max_condition = 1e12;
  /// Substeps of the home-to-target continuation used when a direct solve
  /// from the initial guess fails. Zero disables the fallback.
  int continuation_steps = 16;
};

/// Damped Newton solve of the loop closure over the passive hinges with the
/// servo angles held fixed. Without a guess the solve starts from the home
/// configuration. Throws NoConvergenceError or SingularStepError.
JointState solve_passive(double theta1, double theta2, const DesignParams& params,
                         const std::optional<JointState>& guess = std::nullopt,
                         const SolverOptions& options = {});

/// Orientation of the end-effector link for a (closed) joint state.
EndEffectorPose end_effector_pose(const JointState& state, const DesignParams& params);

/// Inverse Jacobian of the nominal design: maps BodyRates to
/// (theta1_dot, theta2_dot, 0).
///
///   row 1:  -( cos t4,  sin t4,  0      ) / sin t5
///   row 2:   ( sin t3,  0,      -cos t3 )
///   row 3:   ( cos t3,  0,       sin t3 )
///
/// Throws SingularJacobianError when |sin t5| <= 1e-9.
Mat3 inverse_jacobian(const JointState& state);

/// Expresses a chassis-frame angular velocity in the Jacobian frame of `pose`.
BodyRates to_body_rates(const EndEffectorPose& pose, const Vec3& omega_chassis);

struct ActuatorGrid {
  std::vector<double> theta1;
  std::vector<double> theta2;

  /// n x n grid spanning [lo, hi] in both servo angles.
  static ActuatorGrid uniform(std::size_t n, double lo, double hi);
  std::size_t size() const { return theta1.size() * theta2.size(); }
};

struct ScanPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double sin_theta5 = 0.0;
  double condition_number = 0.0;
  bool reachable = false;
  bool singular = false;
};

struct ScanReport {
  std::vector<ScanPoint> points;
  double min_abs_sin_theta5 = 0.0;
  double max_abs_sin_theta5 = 0.0;
  double max_condition_number = 0.0;
  std::size_t reachable_count = 0;
  std::size_t singular_count = 0;
};

/// Thresholds marking a scan point singular.
inline constexpr double kScanSinTheta5Threshold = 1e-6;
inline constexpr double kScanConditionThreshold = 1e8;

/// Solves every grid point (warm-starting along theta2 within each row) and
/// records |sin theta5| and the passive-Jacobian condition number. Failed
/// solves are marked unreachable. Rows are processed by up to `workers`
/// threads; results do not depend on the worker count.
ScanReport singularity_scan(const DesignParams& params, const ActuatorGrid& grid,
                            unsigned workers = 0);

/// CSV: theta1,theta2,sin_theta5,condition_number,reachable,singular
void write_scan_csv(std::ostream& out, const ScanReport& report);

}  // namespace spm
