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

// Simulated stand-in for the laminate prototype: a 5R linkage with perturbed
// twists, offset servo zeros and a compliance sag, driven by first-order
// servos and observed through a noisy motion-capture model.
//
// Servo model. Each servo follows its command through a first-order lag with
// time constant tau. Rate commands (used while sampling) lag on the servo
// rate; position commands (used while tracking) lag on the angle and are
// clamped by the rate limit. tau = 0 gives an ideal servo.
//
// Effective hinge angle of an actuated joint:
//   h_eff = (1 - compliance_gain) * theta + zero_offset
//
// Observation: Q1 = exp(n) * Q0 * pose with n ~ N(0, sigma^2 I) in the world
// frame, reported as Q01 = conj(Q0) * Q1.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "spm/kinematics.hpp"
#include "spm/rotation.hpp"

namespace spm {

struct PlantConfig {
  /// Added to the nominal twists alpha_1..alpha_5 (radians).
  std::array<double, 5> design_perturbations{};
  /// Added to the two actuated hinge angles (radians).
  std::array<double, 2> joint_zero_offsets{};
  double hinge_compliance_gain = 0.0;
  double servo_time_constant = 0.0;
  /// rad/s; infinity disables the limit.
  double servo_rate_limit = std::numeric_limits<double>::infinity();
  double quaternion_noise_std = 0.0;
  UnitQuaternion chassis_mount;
  std::uint64_t rng_seed = 0;

  /// No imperfections, no noise, ideal servos, identity mount.
  static PlantConfig ideal();
  /// 1 deg twist offsets, 0.5 deg zero offsets, 2% sag, 0.1 deg noise,
  /// 10 ms servos limited to 4.8 rad/s, chassis mounted at 30 deg yaw.
  static PlantConfig defaults();

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;

  DesignParams design() const;
};

struct VelocityProfile {
  int id = 0;
  /// Per servo: commanded rate = amplitude * cos(2 pi frequency t + phase).
  std::array<double, 2> amplitude{};
  std::array<double, 2> frequency{};
  std::array<double, 2> phase{};
  double duration = 0.0;

  ActuatorAngles commanded_rate(double t) const;
  /// Servo angles at t = 0 that keep the integrated motion centred on zero.
  ActuatorAngles start_angles() const;
  /// Throws std::invalid_argument when duration <= 0, frequencies <= 0, or
  /// the motion exceeds kServoAngleLimit or `rate_limit`.
  void validate(double rate_limit = std::numeric_limits<double>::infinity()) const;
};

/// Largest servo excursion a profile may request (radians).
inline constexpr double kServoAngleLimit = 1.2;

/// The eleven built-in sampling profiles, 54.04 s each.
std::vector<VelocityProfile> default_profiles();

struct Sample {
  double t = 0.0;
  UnitQuaternion q01;
  double theta1 = 0.0;
  double theta2 = 0.0;
  int profile_id = 0;
};

enum class Split : std::uint8_t { kTrain, kTest };

struct Dataset {
  std::vector<Sample> samples;
  std::vector<Split> split;  // parallel to samples

  std::size_t size() const { return samples.size(); }
  std::size_t count(Split s) const;
  std::vector<std::size_t> indices(Split s) const;
};

struct PlantState {
  double t = 0.0;
  std::array<double, 2> servo{};
  std::array<double, 2> servo_rate{};
  /// Last closed configuration of the perturbed linkage (warm start).
  JointState joints;
  std::mt19937_64 rng;
};

/// Independent generator for one stream (profile, tracking run) of a plant.
std::mt19937_64 make_stream_rng(std::uint64_t seed, std::uint64_t stream_id);

/// Plant at rest at `initial` servo angles. Throws PlantSingularError.
PlantState make_plant_state(const PlantConfig& config, const ActuatorAngles& initial,
                            std::uint64_t stream_id = 0);

/// Noise-free chassis-relative pose of the current state.
EndEffectorPose plant_pose(const PlantConfig& config, const PlantState& state);

/// Noise-free chassis-relative pose of the perturbed linkage at the given
/// servo angles. `warm`, when given, seeds the solve and receives the
/// closed configuration. Throws like solve_passive.
EndEffectorPose plant_forward(const PlantConfig& config, const ActuatorAngles& servo,
                              JointState* warm = nullptr);

/// Noisy observation of the current state. Advances the RNG only.
Sample observe(const PlantConfig& config, PlantState& state, int profile_id = 0);

/// Advances by dt under a rate command and observes. dt in (0, 0.1].
Sample plant_step(const PlantConfig& config, const ActuatorAngles& commanded_rate, double dt,
                  PlantState& state, int profile_id = 0);

/// Advances by dt under a position command and observes. dt in (0, 0.1].
/// Targets beyond +-kServoAngleLimit are clamped to it.
Sample plant_goto(const PlantConfig& config, const ActuatorAngles& target, double dt,
                  PlantState& state, int profile_id = 0);

/// Samples every profile at `sample_rate` Hz (round(duration * rate) samples
/// each) and assigns round(20%) of each profile to the test split. Profiles
/// run on up to `workers` threads; the output does not depend on it.
Dataset generate_dataset(const PlantConfig& config, const std::vector<VelocityProfile>& profiles,
                         double sample_rate, unsigned workers = 0);

}  // namespace spm
