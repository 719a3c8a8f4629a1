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

#include "spm/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "spm/errors.hpp"
#include "spm/kinematics.hpp"

namespace spm {
namespace {

ActuatorAngles sweep_servo(double t) {
  return {0.5 * std::sin(2.0 * kPi * 0.1 * t), 0.4 * std::sin(2.0 * kPi * 0.13 * t + 0.7)};
}

void check_timing(double duration_s, double rate_hz) {
  if (!(duration_s > 0.0) || !(rate_hz >= 10.0) || !std::isfinite(duration_s * rate_hz)) {
    throw std::invalid_argument("trajectory: duration must be > 0 and rate >= 10 Hz");
  }
}

}  // namespace

void DesiredTrajectory::validate() const {
  if (t.empty()) throw std::invalid_argument("trajectory is empty");
  if (t.size() != orientation.size()) throw std::invalid_argument("trajectory size mismatch");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("trajectory timestamps must increase");
  }
}

DesiredTrajectory default_sweep(const PlantConfig& plant, double duration_s, double rate_hz,
                                SweepMode mode) {
  check_timing(duration_s, rate_hz);
  plant.validate();
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  DesiredTrajectory traj;
  traj.t.reserve(n);
  traj.orientation.reserve(n);
  JointState warm;
  for (int i = 0; i < 3; ++i) warm.theta[2 + i] = kHomePassiveAngles[i];
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    const ActuatorAngles s = sweep_servo(t);
    const UnitQuaternion q01 = mode == SweepMode::kFeasible
                                   ? plant_forward(plant, s, &warm).orientation
                                   : forward_kinematics_ideal(s.theta1, s.theta2).orientation;
    traj.t.push_back(t);
    traj.orientation.push_back(quat_compose(plant.chassis_mount, q01));
  }
  return traj;
}

DesiredTrajectory home_trajectory(const PlantConfig& plant, double duration_s, double rate_hz) {
  check_timing(duration_s, rate_hz);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const UnitQuaternion home = quat_compose(plant.chassis_mount, plant_forward(plant, {}).orientation);
  DesiredTrajectory traj;
  for (std::size_t k = 0; k < n; ++k) {
    traj.t.push_back(static_cast<double>(k) / rate_hz);
    traj.orientation.push_back(home);
  }
  return traj;
}

TrackingReport track(const IkPredictor& predictor, const PlantConfig& plant,
                     const DesiredTrajectory& trajectory) {
  trajectory.validate();
  plant.validate();
  TrackingReport report;
  report.steps.reserve(trajectory.size());

  PlantState state;
  ActuatorAngles command;
  bool started = false;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    TrackingStep step;
    step.t = trajectory.t[k];
    step.q01_desired = relative_rotation(plant.chassis_mount, trajectory.orientation[k]);
    if (step.q01_desired.rotate(Vec3::UnitZ()).z() < -1e-9) {
      step.reachable = false;
    } else {
      try {
        command = predictor(step.q01_desired);
      } catch (const Error&) {
        step.reachable = false;
      }
    }
    step.command = command;

    Sample obs;
    if (!started) {
      const ActuatorAngles start{std::clamp(command.theta1, -kServoAngleLimit, kServoAngleLimit),
                                 std::clamp(command.theta2, -kServoAngleLimit, kServoAngleLimit)};
      state = make_plant_state(plant, start, 0);
      state.t = step.t;
      started = true;
      obs = observe(plant, state);
    } else {
      obs = plant_goto(plant, command, step.t - trajectory.t[k - 1], state);
      state.t = step.t;
    }
    step.q01_actual = obs.q01;
    step.desired = quat_to_euler(step.q01_desired);
    step.actual = quat_to_euler(step.q01_actual);
    report.steps.push_back(step);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.loop_hz = static_cast<double>(trajectory.size()) / std::max(elapsed, 1e-9);

  double s_phi = 0.0, s_psi = 0.0, s_theta = 0.0;
  std::size_t n = 0;
  for (const auto& s : report.steps) {
    if (!s.reachable) {
      ++report.unreachable_steps;
      continue;
    }
    s_phi += std::abs(wrap_angle(s.desired.phi - s.actual.phi));
    s_psi += std::abs(wrap_angle(s.desired.psi - s.actual.psi));
    s_theta += std::abs(wrap_angle(s.desired.theta - s.actual.theta));
    ++n;
  }
  if (n > 0) {
    report.mae_phi_deg = rad_to_deg(s_phi / static_cast<double>(n));
    report.mae_psi_deg = rad_to_deg(s_psi / static_cast<double>(n));
    report.mae_theta_deg = rad_to_deg(s_theta / static_cast<double>(n));
  }
  return report;
}

TrackingReport track(const IkModel& model, const PlantConfig& plant,
                     const DesiredTrajectory& trajectory) {
  return track([&model](const UnitQuaternion& q) { return predict(model, q); }, plant, trajectory);
}

double loop_benchmark(const IkPredictor& predictor, const PlantConfig& plant, std::size_t steps) {
  if (steps < 1000) throw std::invalid_argument("loop_benchmark: steps must be >= 1000");
  const double rate = 200.0;
  const auto traj = default_sweep(plant, static_cast<double>(steps) / rate, rate);
  return track(predictor, plant, traj).loop_hz;
}

double loop_benchmark(const IkModel& model, const PlantConfig& plant, std::size_t steps) {
  return loop_benchmark([&model](const UnitQuaternion& q) { return predict(model, q); }, plant,
                        steps);
}

std::vector<Vec3> virtual_endpoint_series(const TrackingReport& report) {
  if (report.steps.empty()) throw std::invalid_argument("virtual_endpoint_series: empty report");
  std::vector<Vec3> out;
  out.reserve(report.steps.size());
  for (const auto& s : report.steps) out.push_back(s.q01_actual.rotate(Vec3::UnitZ()).normalized());
  return out;
}

void write_tracking_csv(std::ostream& out, const TrackingReport& report) {
  out << "t_s,des_phi,des_psi,des_theta,act_phi,act_psi,act_theta\n";
  char buf[192];
  for (const auto& s : report.steps) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t,
                  rad_to_deg(s.desired.phi), rad_to_deg(s.desired.psi), rad_to_deg(s.desired.theta),
                  rad_to_deg(s.actual.phi), rad_to_deg(s.actual.psi), rad_to_deg(s.actual.theta));
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "# mae_phi_deg=%.9g\n# mae_psi_deg=%.9g\n# mae_theta_deg=%.9g\n# loop_hz=%.6g\n"
                "# unreachable_steps=%zu\n",
                report.mae_phi_deg, report.mae_psi_deg, report.mae_theta_deg, report.loop_hz,
                report.unreachable_steps);
  out << buf;
}

void write_endpoint_csv(std::ostream& out, const TrackingReport& report) {
  out << "t_s,x,y,z\n";
  const auto pts = virtual_endpoint_series(report);
  char buf[128];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.12g,%.12g,%.12g\n", report.steps[i].t, pts[i].x(),
                  pts[i].y(), pts[i].z());
    out << buf;
  }
}

}  // namespace spm
