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

#include "spm/plant.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spm/errors.hpp"

namespace spm {
namespace {

void check_dt(double dt) {
  if (!(dt > 0.0 && dt <= 0.1)) {
    throw std::invalid_argument("plant step: dt must be in (0, 0.1]");
  }
}

JointState close_loop(const PlantConfig& config, double servo1, double servo2,
                      const std::optional<JointState>& guess) {
  const double g = config.hinge_compliance_gain;
  const double e1 = (1.0 - g) * servo1 + config.joint_zero_offsets[0];
  const double e2 = (1.0 - g) * servo2 + config.joint_zero_offsets[1];
  return solve_passive(e1, e2, config.design(), guess);
}

void advance(const PlantConfig& config, PlantState& state, double dt) {
  state.t += dt;
  try {
    state.joints = close_loop(config, state.servo[0], state.servo[1], state.joints);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "plant linkage failed to close at t=" << state.t << " s: " << e.what();
    throw PlantSingularError(msg.str(), -1, state.t);
  }
}

}  // namespace

PlantConfig PlantConfig::ideal() { return {}; }

PlantConfig PlantConfig::defaults() {
  PlantConfig c;
  const double a = deg_to_rad(1.0);
  c.design_perturbations = {a, -a, a, -a, a};
  c.joint_zero_offsets = {deg_to_rad(0.5), deg_to_rad(-0.5)};
  c.hinge_compliance_gain = 0.02;
  c.servo_time_constant = 0.01;
  c.servo_rate_limit = 4.8;
  c.quaternion_noise_std = deg_to_rad(0.1);
  c.chassis_mount = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), deg_to_rad(30.0));
  return c;
}

void PlantConfig::validate() const {
  const double lim = deg_to_rad(10.0) + 1e-12;
  for (double p : design_perturbations) {
    if (!(std::abs(p) <= lim)) throw std::invalid_argument("design perturbation exceeds 10 deg");
  }
  for (double p : joint_zero_offsets) {
    if (!(std::abs(p) <= lim)) throw std::invalid_argument("joint zero offset exceeds 10 deg");
  }
  if (!(std::abs(hinge_compliance_gain) < 1.0)) {
    throw std::invalid_argument("hinge compliance gain must be in (-1, 1)");
  }
  if (!(servo_time_constant >= 0.0) || !std::isfinite(servo_time_constant)) {
    throw std::invalid_argument("servo time constant must be >= 0");
  }
  if (!(servo_rate_limit > 0.0)) throw std::invalid_argument("servo rate limit must be > 0");
  if (!(quaternion_noise_std >= 0.0) || !std::isfinite(quaternion_noise_std)) {
    throw std::invalid_argument("quaternion noise std must be >= 0");
  }
}

DesignParams PlantConfig::design() const {
  DesignParams p;
  for (int i = 0; i < 5; ++i) p.alpha[i] += design_perturbations[i];
  return p;
}

ActuatorAngles VelocityProfile::commanded_rate(double t) const {
  return {amplitude[0] * std::cos(2.0 * kPi * frequency[0] * t + phase[0]),
          amplitude[1] * std::cos(2.0 * kPi * frequency[1] * t + phase[1])};
}

ActuatorAngles VelocityProfile::start_angles() const {
  return {amplitude[0] / (2.0 * kPi * frequency[0]) * std::sin(phase[0]),
          amplitude[1] / (2.0 * kPi * frequency[1]) * std::sin(phase[1])};
}

void VelocityProfile::validate(double rate_limit) const {
  if (!(duration > 0.0)) throw std::invalid_argument("profile duration must be > 0");
  for (int k = 0; k < 2; ++k) {
    if (!(frequency[k] > 0.0)) throw std::invalid_argument("profile frequency must be > 0");
    if (!(std::abs(amplitude[k]) <= rate_limit)) {
      throw std::invalid_argument("profile amplitude exceeds the servo rate limit");
    }
    if (!(std::abs(amplitude[k]) / (2.0 * kPi * frequency[k]) <= kServoAngleLimit)) {
      throw std::invalid_argument("profile excursion exceeds the servo angle limit");
    }
  }
}

std::vector<VelocityProfile> default_profiles() {
  // amplitude (rad/s), frequency (Hz), phase (rad) for servo 1 then servo 2
  static constexpr double kTable[11][6] = {
      {0.50, 0.10, 0.0, 0.40, 0.13, 1.0}, {0.60, 0.12, 0.6, 0.70, 0.15, 2.2},
      {0.30, 0.08, 1.2, 0.55, 0.11, 3.0}, {0.80, 0.20, 1.8, 0.45, 0.09, 0.4},
      {0.70, 0.25, 2.4, 0.80, 0.17, 4.0}, {0.25, 0.05, 3.0, 0.35, 0.07, 5.2},
      {0.40, 0.07, 3.6, 0.20, 0.05, 0.9}, {0.55, 0.14, 4.2, 0.65, 0.21, 1.7},
      {0.75, 0.30, 4.8, 0.50, 0.16, 2.6}, {0.35, 0.06, 5.4, 0.60, 0.19, 3.5},
      {0.65, 0.18, 6.0, 0.30, 0.06, 4.6}};
  std::vector<VelocityProfile> out;
  for (int i = 0; i < 11; ++i) {
    VelocityProfile p;
    p.id = i;
    p.amplitude = {kTable[i][0], kTable[i][3]};
    p.frequency = {kTable[i][1], kTable[i][4]};
    p.phase = {kTable[i][2], kTable[i][5]};
    p.duration = 54.04;
    out.push_back(p);
  }
  return out;
}

std::size_t Dataset::count(Split s) const {
  return static_cast<std::size_t>(std::count(split.begin(), split.end(), s));
}

std::vector<std::size_t> Dataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

std::mt19937_64 make_stream_rng(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

PlantState make_plant_state(const PlantConfig& config, const ActuatorAngles& initial,
                            std::uint64_t stream_id) {
  config.validate();
  PlantState s;
  s.servo = {initial.theta1, initial.theta2};
  s.rng = make_stream_rng(config.rng_seed, stream_id);
  try {
    s.joints = close_loop(config, s.servo[0], s.servo[1], std::nullopt);
  } catch (const Error& e) {
    throw PlantSingularError(std::string("plant linkage failed to close at start: ") + e.what(),
                             -1, 0.0);
  }
  return s;
}

EndEffectorPose plant_pose(const PlantConfig& config, const PlantState& state) {
  return end_effector_pose(state.joints, config.design());
}

EndEffectorPose plant_forward(const PlantConfig& config, const ActuatorAngles& servo,
                              JointState* warm) {
  std::optional<JointState> guess;
  if (warm != nullptr) guess = *warm;
  const JointState j = close_loop(config, servo.theta1, servo.theta2, guess);
  if (warm != nullptr) *warm = j;
  return end_effector_pose(j, config.design());
}

Sample observe(const PlantConfig& config, PlantState& state, int profile_id) {
  const UnitQuaternion pose = plant_pose(config, state).orientation;
  UnitQuaternion q1 = quat_compose(config.chassis_mount, pose);
  if (config.quaternion_noise_std > 0.0) {
    std::normal_distribution<double> dist(0.0, config.quaternion_noise_std);
    Vec3 n;
    for (int k = 0; k < 3; ++k) n[k] = dist(state.rng);
    q1 = quat_compose(UnitQuaternion::from_rotation_vector(n), q1);
  }
  Sample s;
  s.t = state.t;
  s.q01 = relative_rotation(config.chassis_mount, q1);
  s.theta1 = wrap_angle(state.servo[0]);
  s.theta2 = wrap_angle(state.servo[1]);
  s.profile_id = profile_id;
  return s;
}

Sample plant_step(const PlantConfig& config, const ActuatorAngles& commanded_rate, double dt,
                  PlantState& state, int profile_id) {
  check_dt(dt);
  const double lim = config.servo_rate_limit;
  const double cmd[2] = {std::clamp(commanded_rate.theta1, -lim, lim),
                         std::clamp(commanded_rate.theta2, -lim, lim)};
  const double tau = config.servo_time_constant;
  for (int k = 0; k < 2; ++k) {
    if (tau <= 0.0) {
      state.servo[k] += cmd[k] * dt;
      state.servo_rate[k] = cmd[k];
      continue;
    }
    // Exact solution of w' = (cmd - w) / tau over the step.
    const double decay = std::exp(-dt / tau);
    const double dw = state.servo_rate[k] - cmd[k];
    state.servo[k] += cmd[k] * dt + dw * tau * (1.0 - decay);
    state.servo_rate[k] = cmd[k] + dw * decay;
  }
  advance(config, state, dt);
  return observe(config, state, profile_id);
}

Sample plant_goto(const PlantConfig& config, const ActuatorAngles& target, double dt,
                  PlantState& state, int profile_id) {
  check_dt(dt);
  // Servo end stops.
  const double tgt[2] = {std::clamp(target.theta1, -kServoAngleLimit, kServoAngleLimit),
                         std::clamp(target.theta2, -kServoAngleLimit, kServoAngleLimit)};
  const double tau = config.servo_time_constant;
  const double frac = tau <= 0.0 ? 1.0 : 1.0 - std::exp(-dt / tau);
  const double max_move = config.servo_rate_limit * dt;
  for (int k = 0; k < 2; ++k) {
    const double move = std::clamp((tgt[k] - state.servo[k]) * frac, -max_move, max_move);
    state.servo[k] += move;
    state.servo_rate[k] = move / dt;
  }
  advance(config, state, dt);
  return observe(config, state, profile_id);
}

namespace {

void run_profile(const PlantConfig& config, const VelocityProfile& profile, double rate,
                 std::vector<Sample>& out) {
  const auto n = static_cast<std::size_t>(std::llround(profile.duration * rate));
  out.clear();
  out.reserve(n);
  if (n == 0) return;
  const double dt = 1.0 / rate;
  PlantState state;
  try {
    state = make_plant_state(config, profile.start_angles(), static_cast<std::uint64_t>(profile.id));
  } catch (const PlantSingularError& e) {
    throw PlantSingularError(e.what(), profile.id, 0.0);
  }
  const ActuatorAngles r0 = profile.commanded_rate(0.0);
  state.servo_rate = {r0.theta1, r0.theta2};
  out.push_back(observe(config, state, profile.id));
  for (std::size_t k = 1; k < n; ++k) {
    // Zero-order hold on the command over each sample interval.
    const double t_prev = static_cast<double>(k - 1) / rate;
    try {
      Sample s = plant_step(config, profile.commanded_rate(t_prev), dt, state, profile.id);
      s.t = static_cast<double>(k) / rate;
      state.t = s.t;
      out.push_back(s);
    } catch (const PlantSingularError& e) {
      std::ostringstream msg;
      msg << "profile " << profile.id << ": " << e.what();
      throw PlantSingularError(msg.str(), profile.id, e.time_s());
    }
  }
}

std::vector<Split> stratified_split(std::size_t n, std::uint64_t seed, int profile_id) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Separate stream from the noise of the same profile.
  auto rng = make_stream_rng(seed, 0x5eed000000000000ULL ^ static_cast<std::uint64_t>(profile_id));
  // Fisher-Yates with an explicit draw keeps the order independent of the
  // standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
  std::vector<Split> out(n, Split::kTrain);
  for (std::size_t i = 0; i < n_test; ++i) out[order[i]] = Split::kTest;
  return out;
}

}  // namespace

Dataset generate_dataset(const PlantConfig& config, const std::vector<VelocityProfile>& profiles,
                         double sample_rate, unsigned workers) {
  if (profiles.empty()) throw std::invalid_argument("generate_dataset: no profiles");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("generate_dataset: sample rate must be > 0");
  }
  if (1.0 / sample_rate > 0.1) throw std::invalid_argument("generate_dataset: sample rate below 10 Hz");
  config.validate();
  for (const auto& p : profiles) p.validate(config.servo_rate_limit);

  std::vector<std::vector<Sample>> parts(profiles.size());
  std::vector<std::exception_ptr> errors(profiles.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(profiles.size()));

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= profiles.size()) return;
        i = next++;
      }
      try {
        run_profile(config, profiles[i], sample_rate, parts[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Dataset ds;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto split = stratified_split(parts[i].size(), config.rng_seed, profiles[i].id);
    ds.samples.insert(ds.samples.end(), parts[i].begin(), parts[i].end());
    ds.split.insert(ds.split.end(), split.begin(), split.end());
  }
  return ds;
}

}  // namespace spm
