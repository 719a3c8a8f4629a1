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

// JSON configuration files. Keys are flat and fixed; an unknown key is an
// error. Angles are degrees in every file and radians everywhere else.
//
// Plant file keys (all optional, missing keys take the preset's value):
//   preset                     "defaults" | "ideal"
//   alpha_offsets_deg          [5]
//   joint_zero_offsets_deg     [2]
//   hinge_compliance_gain
//   servo_time_constant_s
//   servo_rate_limit_deg_s     number, or null for no limit
//   quaternion_noise_std_deg
//   chassis_mount_wxyz         [4]
//   rng_seed
//
// Profile file keys:
//   sample_rate_hz
//   profiles  [{id, amplitude_deg_s[2], frequency_hz[2], phase_deg[2], duration_s}]
//   or "profiles": "defaults" for the built-in set
//
// Hyperparameter file keys: hidden_units, activation, tolerance,
// max_iterations, patience, batch_size, rng_seed, adam_step_size,
// adam_beta1, adam_beta2, adam_epsilon.
//
// Run file keys: plant_config, profiles, hyperparams (paths relative to the
// run file), output_dir, seed, scan_alpha_deg [5], scan_grid_points,
// scan_range_deg, track_mode ("feasible" | "nominal" | "home"),
// track_duration_s, track_rate_hz, bench_steps.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spm/control.hpp"
#include "spm/mlp.hpp"
#include "spm/plant.hpp"

namespace spm {

struct ProfileSet {
  double sample_rate_hz = 180.0;
  std::vector<VelocityProfile> profiles = default_profiles();
};

enum class TrackMode { kFeasible, kNominal, kHome };

struct RunConfig {
  PlantConfig plant = PlantConfig::defaults();
  ProfileSet profiles;
  MlpHyperparams hyperparams;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::array<double, 5> scan_alpha_deg{90.0, 90.0, 90.0, 90.0, 90.0};
  std::size_t scan_grid_points = 30;
  double scan_range_deg = 68.75493541569878;  // 1.2 rad
  TrackMode track_mode = TrackMode::kFeasible;
  double track_duration_s = 30.0;
  double track_rate_hz = 200.0;
  std::size_t bench_steps = 10000;

  /// Pushes `seed` into the plant and training seeds.
  void apply_seed();
};

// All parsers throw ConfigError with the offending key in the message.
PlantConfig parse_plant_config(const std::string& json_text);
ProfileSet parse_profiles(const std::string& json_text);
MlpHyperparams parse_hyperparams(const std::string& json_text);
/// Relative paths inside the run file resolve against `base_dir`.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

PlantConfig load_plant_config(const std::string& path);
ProfileSet load_profiles(const std::string& path);
MlpHyperparams load_hyperparams(const std::string& path);
RunConfig load_run_config(const std::string& path);

std::string plant_config_to_json(const PlantConfig& c);
std::string profiles_to_json(const ProfileSet& p);
std::string hyperparams_to_json(const MlpHyperparams& hp);

/// Self-contained description of a run: tool version, command, seed, the
/// effective configs and their FNV-1a hash, plus command-specific entries.
std::string make_manifest(const std::string& command, const RunConfig& run,
                          const std::vector<std::pair<std::string, std::string>>& extra);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& data);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace spm
