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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spm/control.hpp"
#include "spm/errors.hpp"
#include "test_util.hpp"

namespace spm {
namespace {

PlantConfig noiseless_ideal_with_mount() {
  PlantConfig c = PlantConfig::ideal();
  c.chassis_mount = UnitQuaternion::from_rotation_vector(Vec3(0.2, -0.1, 0.9));
  return c;
}

TEST(Trajectory, Validation) {
  DesiredTrajectory t;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.t = {0.0, 0.1, 0.1};
  t.orientation.resize(3);
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.t = {0.0, 0.1};
  EXPECT_THROW(t.validate(), std::invalid_argument);
  t.orientation.resize(2);
  EXPECT_NO_THROW(t.validate());
}

TEST(DefaultSweep, SizeAndModes) {
  const PlantConfig c = PlantConfig::defaults();
  const auto feasible = default_sweep(c, 2.0, 200.0);
  EXPECT_EQ(feasible.size(), 400u);
  EXPECT_NO_THROW(feasible.validate());
  const auto nominal = default_sweep(c, 2.0, 200.0, SweepMode::kNominal);
  // The perturbed plant does not reach the nominal orientations exactly.
  double gap = 0.0;
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    gap = std::max(gap, quat_angle_error(feasible.orientation[i], nominal.orientation[i]));
  }
  EXPECT_GT(gap, deg_to_rad(0.1));
  EXPECT_THROW(default_sweep(c, 0.0, 200.0), std::invalid_argument);
}

TEST(Track, FrameConsistency) {
  const PlantConfig c = noiseless_ideal_with_mount();
  const auto traj = default_sweep(c, 2.0, 200.0);
  const auto r = track(analytic_ik, c, traj);
  ASSERT_EQ(r.steps.size(), traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    ASSERT_TRUE(test::quat_close(quat_compose(c.chassis_mount, r.steps[i].q01_desired),
                                 traj.orientation[i], 1e-10));
  }
}

TEST(Track, OraclePipelineAddsNoError) {
  const PlantConfig c = noiseless_ideal_with_mount();
  for (SweepMode mode : {SweepMode::kFeasible, SweepMode::kNominal}) {
    const auto r = track(analytic_ik, c, default_sweep(c, 30.0, 200.0, mode));
    EXPECT_LE(r.mae_phi_deg, 1e-6);
    EXPECT_LE(r.mae_psi_deg, 1e-6);
    EXPECT_LE(r.mae_theta_deg, 1e-6);
    EXPECT_EQ(r.unreachable_steps, 0u);
    EXPECT_GT(r.loop_hz, 0.0);
  }
}

TEST(Track, HomeHoldIsWithinNoiseFloor) {
  PlantConfig c = PlantConfig::ideal();
  c.quaternion_noise_std = deg_to_rad(0.1);
  const auto r = track(analytic_ik, c, home_trajectory(c, 5.0, 200.0));
  // Mean |N(0, s^2)| = s sqrt(2/pi) per component, bounded loosely here.
  for (double mae : {r.mae_phi_deg, r.mae_psi_deg, r.mae_theta_deg}) {
    EXPECT_LT(mae, 0.15);
    EXPECT_GT(mae, 0.0);
  }
}

TEST(Track, ReportedMaeMatchesStoredSeries) {
  const PlantConfig c = PlantConfig::defaults();
  const auto r = track(analytic_ik, c, default_sweep(c, 5.0, 200.0));
  double p = 0, s = 0, t = 0;
  for (const auto& st : r.steps) {
    p += std::abs(wrap_angle(st.desired.phi - st.actual.phi));
    s += std::abs(wrap_angle(st.desired.psi - st.actual.psi));
    t += std::abs(wrap_angle(st.desired.theta - st.actual.theta));
  }
  const double n = static_cast<double>(r.steps.size());
  EXPECT_NEAR(r.mae_phi_deg, rad_to_deg(p / n), 1e-12);
  EXPECT_NEAR(r.mae_psi_deg, rad_to_deg(s / n), 1e-12);
  EXPECT_NEAR(r.mae_theta_deg, rad_to_deg(t / n), 1e-12);
}

TEST(Track, UnreachableStepsAreFlaggedNotFatal) {
  const PlantConfig c = PlantConfig::ideal();
  auto traj = default_sweep(c, 1.0, 100.0);
  // Tip the middle sample below the chassis plane.
  traj.orientation[50] = UnitQuaternion::from_axis_angle(Vec3::UnitX(), 2.0);
  const auto r = track(analytic_ik, c, traj);
  EXPECT_EQ(r.unreachable_steps, 1u);
  EXPECT_FALSE(r.steps[50].reachable);
  EXPECT_EQ(r.steps[50].command.theta1, r.steps[49].command.theta1);
}

TEST(VirtualEndpoints, Examples) {
  TrackingReport r;
  r.steps.resize(2);
  r.steps[1].q01_actual = UnitQuaternion::from_axis_angle(Vec3::UnitX(), kPi / 2);
  const auto pts = virtual_endpoint_series(r);
  EXPECT_LT((pts[0] - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((pts[1] - Vec3(0, -1, 0)).norm(), 1e-15);
  EXPECT_THROW(virtual_endpoint_series(TrackingReport{}), std::invalid_argument);
}

TEST(VirtualEndpoints, UnitNorm) {
  const PlantConfig c = PlantConfig::defaults();
  const auto r = track(analytic_ik, c, default_sweep(c, 3.0, 200.0));
  for (const auto& p : virtual_endpoint_series(r)) EXPECT_NEAR(p.norm(), 1.0, 1e-9);
}

TEST(TrackingCsv, LayoutAndSummary) {
  const PlantConfig c = PlantConfig::ideal();
  const auto r = track(analytic_ik, c, default_sweep(c, 0.1, 100.0));
  std::ostringstream out;
  write_tracking_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t_s,des_phi,des_psi,des_theta,act_phi,act_psi,act_theta");
  int rows = 0, summary = 0;
  while (std::getline(in, line)) (line.rfind("# ", 0) == 0 ? summary : rows)++;
  EXPECT_EQ(rows, 10);
  EXPECT_EQ(summary, 5);
  EXPECT_NE(out.str().find("# mae_psi_deg="), std::string::npos);

  std::ostringstream ep;
  write_endpoint_csv(ep, r);
  EXPECT_EQ(ep.str().substr(0, 10), "t_s,x,y,z\n");
}

double median_rate(const IkModel& m, const PlantConfig& c, std::size_t steps) {
  std::vector<double> v;
  for (int i = 0; i < 3; ++i) v.push_back(loop_benchmark(m, c, steps));
  std::sort(v.begin(), v.end());
  return v[1];
}

TEST(LoopBenchmark, RatesAndValidation) {
  const PlantConfig c = PlantConfig::defaults();
  const IkModel small = make_untrained_model(10, 1);
  const IkModel big = make_untrained_model(2700, 1);
  EXPECT_THROW(loop_benchmark(small, c, 999), std::invalid_argument);
  const double big_rate = median_rate(big, c, 10000);
  EXPECT_GE(big_rate, 200.0);
  EXPECT_GT(median_rate(small, c, 10000), big_rate);
  const double short_rate = median_rate(big, c, 1000);
  EXPECT_NEAR(short_rate / big_rate, 1.0, 0.2);
}

}  // namespace
}  // namespace spm
