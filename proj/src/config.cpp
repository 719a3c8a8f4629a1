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

#include "spm/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spm/errors.hpp"

namespace spm {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(std::string(what) + ": top level must be an object");
  return j;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& j, const std::string& key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(what) + ": key '" + key + "' has the wrong type or shape");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
auto validated(F&& f, const char* what) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

json plant_json(const PlantConfig& c) {
  std::array<double, 5> a;
  for (int i = 0; i < 5; ++i) a[i] = rad_to_deg(c.design_perturbations[i]);
  json j;
  j["alpha_offsets_deg"] = a;
  j["joint_zero_offsets_deg"] = {rad_to_deg(c.joint_zero_offsets[0]),
                                 rad_to_deg(c.joint_zero_offsets[1])};
  j["hinge_compliance_gain"] = c.hinge_compliance_gain;
  j["servo_time_constant_s"] = c.servo_time_constant;
  if (std::isfinite(c.servo_rate_limit)) {
    j["servo_rate_limit_deg_s"] = rad_to_deg(c.servo_rate_limit);
  } else {
    j["servo_rate_limit_deg_s"] = nullptr;
  }
  j["quaternion_noise_std_deg"] = rad_to_deg(c.quaternion_noise_std);
  j["chassis_mount_wxyz"] = c.chassis_mount.wxyz();
  j["rng_seed"] = c.rng_seed;
  return j;
}

json profiles_json(const ProfileSet& p) {
  json list = json::array();
  for (const auto& v : p.profiles) {
    list.push_back({{"id", v.id},
                    {"amplitude_deg_s", {rad_to_deg(v.amplitude[0]), rad_to_deg(v.amplitude[1])}},
                    {"frequency_hz", v.frequency},
                    {"phase_deg", {rad_to_deg(v.phase[0]), rad_to_deg(v.phase[1])}},
                    {"duration_s", v.duration}});
  }
  return {{"sample_rate_hz", p.sample_rate_hz}, {"profiles", list}};
}

json hyperparams_json(const MlpHyperparams& hp) {
  return {{"hidden_units", hp.hidden_units}, {"activation", hp.activation},
          {"tolerance", hp.tolerance},       {"max_iterations", hp.max_iterations},
          {"patience", hp.patience},         {"batch_size", hp.batch_size},
          {"rng_seed", hp.rng_seed},         {"adam_step_size", hp.adam.step_size},
          {"adam_beta1", hp.adam.beta1},     {"adam_beta2", hp.adam.beta2},
          {"adam_epsilon", hp.adam.epsilon}};
}

std::array<double, 2> deg2(const std::array<double, 2>& d) {
  return {deg_to_rad(d[0]), deg_to_rad(d[1])};
}

}  // namespace

void RunConfig::apply_seed() {
  if (!seed) return;
  plant.rng_seed = *seed;
  hyperparams.rng_seed = *seed;
}

PlantConfig parse_plant_config(const std::string& text) {
  constexpr const char* what = "plant config";
  const json j = parse_object(text, what);
  reject_unknown(j,
                 {"preset", "alpha_offsets_deg", "joint_zero_offsets_deg", "hinge_compliance_gain",
                  "servo_time_constant_s", "servo_rate_limit_deg_s", "quaternion_noise_std_deg",
                  "chassis_mount_wxyz", "rng_seed"},
                 what);
  PlantConfig c = PlantConfig::defaults();
  if (j.contains("preset")) {
    const auto preset = get<std::string>(j, "preset", what);
    if (preset == "ideal") {
      c = PlantConfig::ideal();
    } else if (preset != "defaults") {
      throw ConfigError("plant config: unknown preset '" + preset + "'");
    }
  }
  if (j.contains("alpha_offsets_deg")) {
    const auto a = get<std::array<double, 5>>(j, "alpha_offsets_deg", what);
    for (int i = 0; i < 5; ++i) c.design_perturbations[i] = deg_to_rad(a[i]);
  }
  if (j.contains("joint_zero_offsets_deg")) {
    c.joint_zero_offsets = deg2(get<std::array<double, 2>>(j, "joint_zero_offsets_deg", what));
  }
  if (j.contains("hinge_compliance_gain")) {
    c.hinge_compliance_gain = get<double>(j, "hinge_compliance_gain", what);
  }
  if (j.contains("servo_time_constant_s")) {
    c.servo_time_constant = get<double>(j, "servo_time_constant_s", what);
  }
  if (j.contains("servo_rate_limit_deg_s")) {
    c.servo_rate_limit = j["servo_rate_limit_deg_s"].is_null()
                             ? std::numeric_limits<double>::infinity()
                             : deg_to_rad(get<double>(j, "servo_rate_limit_deg_s", what));
  }
  if (j.contains("quaternion_noise_std_deg")) {
    c.quaternion_noise_std = deg_to_rad(get<double>(j, "quaternion_noise_std_deg", what));
  }
  if (j.contains("chassis_mount_wxyz")) {
    const auto q = get<std::array<double, 4>>(j, "chassis_mount_wxyz", what);
    c.chassis_mount = validated([&] { return UnitQuaternion(q[0], q[1], q[2], q[3]); }, what);
  }
  if (j.contains("rng_seed")) c.rng_seed = get<std::uint64_t>(j, "rng_seed", what);
  validated([&] { c.validate(); return 0; }, what);
  return c;
}

ProfileSet parse_profiles(const std::string& text) {
  constexpr const char* what = "profile config";
  const json j = parse_object(text, what);
  reject_unknown(j, {"sample_rate_hz", "profiles"}, what);
  ProfileSet set;
  if (j.contains("sample_rate_hz")) set.sample_rate_hz = get<double>(j, "sample_rate_hz", what);
  if (!(set.sample_rate_hz >= 10.0) || !std::isfinite(set.sample_rate_hz)) {
    throw ConfigError("profile config: sample_rate_hz must be >= 10");
  }
  if (j.contains("profiles") && !(j["profiles"].is_string() && j["profiles"] == "defaults")) {
    if (!j["profiles"].is_array() || j["profiles"].empty()) {
      throw ConfigError("profile config: 'profiles' must be \"defaults\" or a non-empty list");
    }
    set.profiles.clear();
    for (const json& e : j["profiles"]) {
      if (!e.is_object()) throw ConfigError("profile config: profile entries must be objects");
      reject_unknown(e, {"id", "amplitude_deg_s", "frequency_hz", "phase_deg", "duration_s"}, what);
      VelocityProfile p;
      p.id = get<int>(e, "id", what);
      p.amplitude = deg2(get<std::array<double, 2>>(e, "amplitude_deg_s", what));
      p.frequency = get<std::array<double, 2>>(e, "frequency_hz", what);
      p.phase = e.contains("phase_deg") ? deg2(get<std::array<double, 2>>(e, "phase_deg", what))
                                        : std::array<double, 2>{};
      p.duration = get<double>(e, "duration_s", what);
      validated([&] { p.validate(); return 0; }, what);
      set.profiles.push_back(p);
    }
    std::set<int> ids;
    for (const auto& p : set.profiles) {
      if (!ids.insert(p.id).second) {
        throw ConfigError("profile config: duplicate profile id " + std::to_string(p.id));
      }
    }
  }
  return set;
}

MlpHyperparams parse_hyperparams(const std::string& text) {
  constexpr const char* what = "hyperparameter config";
  const json j = parse_object(text, what);
  reject_unknown(j,
                 {"hidden_units", "activation", "tolerance", "max_iterations", "patience",
                  "batch_size", "rng_seed", "adam_step_size", "adam_beta1", "adam_beta2",
                  "adam_epsilon"},
                 what);
  MlpHyperparams hp;
  if (j.contains("hidden_units")) hp.hidden_units = get<std::size_t>(j, "hidden_units", what);
  if (j.contains("activation")) hp.activation = get<std::string>(j, "activation", what);
  if (j.contains("tolerance")) hp.tolerance = get<double>(j, "tolerance", what);
  if (j.contains("max_iterations")) hp.max_iterations = get<int>(j, "max_iterations", what);
  if (j.contains("patience")) hp.patience = get<int>(j, "patience", what);
  if (j.contains("batch_size")) hp.batch_size = get<std::size_t>(j, "batch_size", what);
  if (j.contains("rng_seed")) hp.rng_seed = get<std::uint64_t>(j, "rng_seed", what);
  if (j.contains("adam_step_size")) hp.adam.step_size = get<double>(j, "adam_step_size", what);
  if (j.contains("adam_beta1")) hp.adam.beta1 = get<double>(j, "adam_beta1", what);
  if (j.contains("adam_beta2")) hp.adam.beta2 = get<double>(j, "adam_beta2", what);
  if (j.contains("adam_epsilon")) hp.adam.epsilon = get<double>(j, "adam_epsilon", what);
  validated([&] { hp.validate(); return 0; }, what);
  return hp;
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
  constexpr const char* what = "run config";
  const json j = parse_object(text, what);
  reject_unknown(j,
                 {"plant_config", "profiles", "hyperparams", "output_dir", "seed", "scan_alpha_deg",
                  "scan_grid_points", "scan_range_deg", "track_mode", "track_duration_s",
                  "track_rate_hz", "bench_steps"},
                 what);
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (fs::path(base_dir) / path).string();
  };
  RunConfig r;
  if (j.contains("plant_config")) r.plant = load_plant_config(resolve(get<std::string>(j, "plant_config", what)));
  if (j.contains("profiles")) r.profiles = load_profiles(resolve(get<std::string>(j, "profiles", what)));
  if (j.contains("hyperparams")) r.hyperparams = load_hyperparams(resolve(get<std::string>(j, "hyperparams", what)));
  if (j.contains("output_dir")) r.output_dir = resolve(get<std::string>(j, "output_dir", what));
  if (j.contains("seed") && !j["seed"].is_null()) r.seed = get<std::uint64_t>(j, "seed", what);
  if (j.contains("scan_alpha_deg")) r.scan_alpha_deg = get<std::array<double, 5>>(j, "scan_alpha_deg", what);
  if (j.contains("scan_grid_points")) r.scan_grid_points = get<std::size_t>(j, "scan_grid_points", what);
  if (j.contains("scan_range_deg")) r.scan_range_deg = get<double>(j, "scan_range_deg", what);
  if (j.contains("track_mode")) {
    const auto m = get<std::string>(j, "track_mode", what);
    if (m == "feasible") {
      r.track_mode = TrackMode::kFeasible;
    } else if (m == "nominal") {
      r.track_mode = TrackMode::kNominal;
    } else if (m == "home") {
      r.track_mode = TrackMode::kHome;
    } else {
      throw ConfigError("run config: unknown track_mode '" + m + "'");
    }
  }
  if (j.contains("track_duration_s")) r.track_duration_s = get<double>(j, "track_duration_s", what);
  if (j.contains("track_rate_hz")) r.track_rate_hz = get<double>(j, "track_rate_hz", what);
  if (j.contains("bench_steps")) r.bench_steps = get<std::size_t>(j, "bench_steps", what);
  if (r.scan_grid_points < 1) throw ConfigError("run config: scan_grid_points must be >= 1");
  if (!(r.scan_range_deg > 0.0)) throw ConfigError("run config: scan_range_deg must be > 0");
  if (!(r.track_duration_s > 0.0) || !(r.track_rate_hz >= 10.0)) {
    throw ConfigError("run config: track_duration_s must be > 0 and track_rate_hz >= 10");
  }
  if (r.bench_steps < 1000) throw ConfigError("run config: bench_steps must be >= 1000");
  r.apply_seed();
  return r;
}

PlantConfig load_plant_config(const std::string& path) { return parse_plant_config(read_file(path)); }
ProfileSet load_profiles(const std::string& path) { return parse_profiles(read_file(path)); }
MlpHyperparams load_hyperparams(const std::string& path) { return parse_hyperparams(read_file(path)); }

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_file(path), fs::path(path).parent_path().string());
}

std::string plant_config_to_json(const PlantConfig& c) { return plant_json(c).dump(2) + "\n"; }
std::string profiles_to_json(const ProfileSet& p) { return profiles_json(p).dump(2) + "\n"; }
std::string hyperparams_to_json(const MlpHyperparams& hp) { return hyperparams_json(hp).dump(2) + "\n"; }

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string make_manifest(const std::string& command, const RunConfig& run,
                          const std::vector<std::pair<std::string, std::string>>& extra) {
  json cfg = {{"plant", plant_json(run.plant)},
              {"profiles", profiles_json(run.profiles)},
              {"hyperparams", hyperparams_json(run.hyperparams)}};
  json m;
  m["tool"] = "spm";
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = run.seed ? json(*run.seed) : json(nullptr);
  m["config_hash"] = fnv1a_hex(cfg.dump());
  m["config"] = cfg;
  for (const auto& [k, v] : extra) m[k] = v;
  return m.dump(2) + "\n";
}

}  // namespace spm
