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

// Open-loop orientation tracking: desired world orientation -> chassis
// relative rotation -> predicted servo angles -> position command -> observed
// orientation. There is no feedback from the observation.
//
// Euler angles throughout are intrinsic Z-Y-X of the chassis-relative
// rotation Q01 (the quantity the predictor controls).

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "spm/mlp.hpp"
#include "spm/plant.hpp"
#include "spm/rotation.hpp"

namespace spm {

struct DesiredTrajectory {
  std::vector<double> t;
  /// Desired end-effector orientation Q1_D in the world frame.
  std::vector<UnitQuaternion> orientation;

  std::size_t size() const { return t.size(); }
  /// Throws std::invalid_argument on size mismatch, an empty trajectory or
  /// timestamps that do not strictly increase.
  void validate() const;
};

enum class SweepMode {
  /// Orientations the plant itself reaches along the servo sweep.
  kFeasible,
  /// Orientations of the nominal linkage along the servo sweep.
  kNominal,
};

/// Servo Lissajous sweep theta1 = 0.5 sin(2 pi 0.1 t),
/// theta2 = 0.4 sin(2 pi 0.13 t + 0.7), mapped to world orientations.
DesiredTrajectory default_sweep(const PlantConfig& plant, double duration_s = 30.0,
                                double rate_hz = 200.0, SweepMode mode = SweepMode::kFeasible);

/// The plant's home orientation held for the whole duration.
DesiredTrajectory home_trajectory(const PlantConfig& plant, double duration_s, double rate_hz);

struct TrackingStep {
  double t = 0.0;
  UnitQuaternion q01_desired;
  UnitQuaternion q01_actual;
  EulerAngles desired;
  EulerAngles actual;
  ActuatorAngles command;
  /// False when the desired orientation left the hemisphere or the predictor
  /// rejected it; the previous command is then held.
  bool reachable = true;
};

struct TrackingReport {
  std::vector<TrackingStep> steps;
  /// Over reachable steps, wrapped differences, degrees.
  double mae_phi_deg = 0.0;
  double mae_psi_deg = 0.0;
  double mae_theta_deg = 0.0;
  /// Wall-clock rate of the loop (predict + plant step + bookkeeping).
  double loop_hz = 0.0;
  std::size_t unreachable_steps = 0;
};

/// Runs the loop; the plant starts at rest at the first command. Throws
/// PlantSingularError when the linkage fails to close.
TrackingReport track(const IkPredictor& predictor, const PlantConfig& plant,
                     const DesiredTrajectory& trajectory);
TrackingReport track(const IkModel& model, const PlantConfig& plant,
                     const DesiredTrajectory& trajectory);

/// Mean loop rate over `steps` iterations of the default 200 Hz sweep.
/// Throws std::invalid_argument when steps < 1000.
double loop_benchmark(const IkPredictor& predictor, const PlantConfig& plant, std::size_t steps);
double loop_benchmark(const IkModel& model, const PlantConfig& plant, std::size_t steps);

/// (0, 0, 1) rotated by each actual chassis-relative orientation.
std::vector<Vec3> virtual_endpoint_series(const TrackingReport& report);

/// t_s,des_phi,des_psi,des_theta,act_phi,act_psi,act_theta (degrees) followed
/// by "# key=value" summary lines.
void write_tracking_csv(std::ostream& out, const TrackingReport& report);

/// t_s,x,y,z
void write_endpoint_csv(std::ostream& out, const TrackingReport& report);

}  // namespace spm
