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

#include <cmath>
#include <sstream>

#include "spm/dataset_io.hpp"
#include "spm/errors.hpp"
#include "spm/mlp.hpp"
#include "spm/plant.hpp"
#include "test_util.hpp"

namespace spm {
namespace {

VelocityProfile short_profile(int id, double duration) {
  VelocityProfile p;
  p.id = id;
  p.amplitude = {0.6, 0.5};
  p.frequency = {0.2, 0.15};
  p.phase = {0.3, 1.1};
  p.duration = duration;
  return p;
}

TEST(PlantConfig, PresetsValidate) {
  EXPECT_NO_THROW(PlantConfig::ideal().validate());
  EXPECT_NO_THROW(PlantConfig::defaults().validate());
  PlantConfig c;
  c.design_perturbations[3] = deg_to_rad(10.5);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.servo_time_constant = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.quaternion_noise_std = -1e-3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(VelocityProfile, Validation) {
  EXPECT_NO_THROW(short_profile(0, 1.0).validate());
  EXPECT_THROW(short_profile(0, 0.0).validate(), std::invalid_argument);
  auto p = short_profile(0, 1.0);
  p.amplitude[0] = 2.0;
  p.frequency[0] = 0.05;  // 6.4 rad excursion
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(short_profile(0, 1.0).validate(0.1), std::invalid_argument);
  for (const auto& d : default_profiles()) EXPECT_NO_THROW(d.validate(PlantConfig::defaults().servo_rate_limit));
}

TEST(PlantStep, IdealPlantMatchesIdealForwardKinematics) {
  const PlantConfig c = PlantConfig::ideal();
  PlantState s = make_plant_state(c, {0.1, -0.2});
  for (int k = 0; k < 200; ++k) {
    const Sample obs = plant_step(c, {0.8 * std::cos(0.05 * k), -0.6}, 0.01, s);
    const auto ideal = forward_kinematics_ideal(obs.theta1, obs.theta2);
    ASSERT_LT(quat_angle_error(obs.q01, ideal.orientation), 1e-10);
  }
}

TEST(PlantStep, ZeroRateHoldsStateAndNoiseHasConfiguredSpread) {
  PlantConfig c = PlantConfig::defaults();
  c.quaternion_noise_std = deg_to_rad(0.1);
  PlantState s = make_plant_state(c, {0.2, 0.3});
  const auto before = s.servo;
  const UnitQuaternion truth = plant_pose(c, s).orientation;
  const int n = 10000;
  Vec3 sum = Vec3::Zero(), sq = Vec3::Zero();
  for (int k = 0; k < n; ++k) {
    const Sample obs = plant_step(c, {0.0, 0.0}, 0.005, s);
    // World-frame noise seen through the mount: rotate it back to world.
    const Vec3 e = c.chassis_mount.rotate(
        quat_compose(obs.q01, truth.conjugate()).to_rotation_vector());
    sum += e;
    sq += e.cwiseProduct(e);
  }
  EXPECT_EQ(s.servo, before);
  for (int a = 0; a < 3; ++a) {
    const double mean = sum[a] / n;
    const double sd = std::sqrt(sq[a] / n - mean * mean);
    EXPECT_NEAR(sd, c.quaternion_noise_std, 0.2 * c.quaternion_noise_std) << "axis " << a;
  }
}

TEST(PlantStep, FirstOrderLagReaches632PercentAtTau) {
  PlantConfig c = PlantConfig::ideal();
  c.servo_time_constant = 0.05;
  PlantState s = make_plant_state(c, {0.0, 0.0});
  const double rate = 0.4, dt = 0.001;
  for (int k = 0; k < 50; ++k) plant_step(c, {rate, rate}, dt, s);
  // Ramp input: the lag behind the ideal ramp approaches rate * tau.
  const double ramp = rate * 0.05;
  const double lag = ramp - s.servo[0];
  EXPECT_NEAR(lag / ramp, 1.0 - std::exp(-1.0), 1e-9);
  EXPECT_NEAR(s.servo_rate[0] / rate, 1.0 - std::exp(-1.0), 1e-9);
}

TEST(PlantGoto, RateLimitedApproach) {
  PlantConfig c = PlantConfig::ideal();
  c.servo_rate_limit = 1.0;
  PlantState s = make_plant_state(c, {0.0, 0.0});
  plant_goto(c, {0.5, -0.001}, 0.01, s);
  EXPECT_NEAR(s.servo[0], 0.01, 1e-15);
  EXPECT_NEAR(s.servo[1], -0.001, 1e-15);
  c.servo_time_constant = 0.02;
  PlantState t = make_plant_state(c, {0.0, 0.0});
  plant_goto(c, {0.001, 0.0}, 0.02, t);
  EXPECT_NEAR(t.servo[0], 0.001 * (1.0 - std::exp(-1.0)), 1e-15);
}

TEST(PlantGoto, TargetsStopAtServoLimit) {
  const PlantConfig c = PlantConfig::ideal();
  PlantState s = make_plant_state(c, {0.0, 0.0});
  for (int i = 0; i < 10; ++i) plant_goto(c, {3.0, -kPi / 2}, 0.01, s);
  EXPECT_EQ(s.servo[0], kServoAngleLimit);
  EXPECT_EQ(s.servo[1], -kServoAngleLimit);
}

TEST(PlantStep, RejectsBadStep) {
  const PlantConfig c = PlantConfig::ideal();
  PlantState s = make_plant_state(c, {});
  EXPECT_THROW(plant_step(c, {}, 0.0, s), std::invalid_argument);
  EXPECT_THROW(plant_step(c, {}, 0.2, s), std::invalid_argument);
}

TEST(GenerateDataset, DefaultSizeAndSplit) {
  const Dataset ds = generate_dataset(PlantConfig::defaults(), default_profiles(), 180.0);
  EXPECT_NEAR(static_cast<double>(ds.size()), 107000.0, 11.0);
  for (int id = 0; id < 11; ++id) {
    std::size_t n = 0, test = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.samples[i].profile_id != id) continue;
      ++n;
      test += ds.split[i] == Split::kTest;
    }
    EXPECT_EQ(n, 9727u);
    EXPECT_EQ(test, 1945u);
  }
  for (const auto& s : ds.samples) {
    ASSERT_GE(s.q01.w(), 0.0);
    ASSERT_LE(std::abs(s.theta1), kPi);
  }
}

TEST(GenerateDataset, SplitArithmetic) {
  const Dataset ds = generate_dataset(PlantConfig::defaults(), {short_profile(3, 1.0)}, 100.0);
  EXPECT_EQ(ds.size(), 100u);
  EXPECT_EQ(ds.count(Split::kTrain), 80u);
  EXPECT_EQ(ds.count(Split::kTest), 20u);
  EXPECT_THROW(generate_dataset(PlantConfig::defaults(), {}, 100.0), std::invalid_argument);
}

bool identical(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size() || a.split != b.split) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Sample &x = a.samples[i], &y = b.samples[i];
    if (x.t != y.t || !(x.q01 == y.q01) || x.theta1 != y.theta1 || x.theta2 != y.theta2 ||
        x.profile_id != y.profile_id) {
      return false;
    }
  }
  return true;
}

TEST(GenerateDataset, DeterministicUnderSeedAndWorkers) {
  PlantConfig c = PlantConfig::defaults();
  c.rng_seed = 42;
  const std::vector<VelocityProfile> ps = {short_profile(0, 3.0), short_profile(5, 2.0),
                                           short_profile(9, 2.5)};
  const Dataset a = generate_dataset(c, ps, 180.0, 1);
  const Dataset b = generate_dataset(c, ps, 180.0, 3);
  EXPECT_TRUE(identical(a, b));
  c.rng_seed = 43;
  EXPECT_FALSE(identical(a, generate_dataset(c, ps, 180.0, 1)));
}

TEST(GenerateDataset, IdealPlantIsExactlyInvertible) {
  const Dataset ds = generate_dataset(PlantConfig::ideal(), default_profiles(), 20.0);
  for (const auto& s : ds.samples) {
    const auto ik = inverse_kinematics(s.q01.rotate(Vec3::UnitZ()));
    ASSERT_NEAR(ik.theta1, s.theta1, 1e-7);
    ASSERT_NEAR(ik.theta2, s.theta2, 1e-7);
  }
}

TEST(GenerateDataset, AnalyticErrorGrowsWithImperfection) {
  double previous = -1.0;
  for (double deg : {0.0, 1.0, 2.0, 4.0}) {
    PlantConfig c = PlantConfig::ideal();
    const double a = deg_to_rad(deg);
    c.design_perturbations = {a, -a, a, -a, a};
    c.joint_zero_offsets = {0.5 * a, -0.5 * a};
    c.hinge_compliance_gain = 0.02 * deg;
    const Dataset ds = generate_dataset(c, default_profiles(), 10.0);
    const auto r = evaluate(analytic_ik, ds, Split::kTest);
    const double mae = r.mae_theta1_deg + r.mae_theta2_deg;
    EXPECT_GE(mae, previous) << deg << " deg";
    previous = mae;
  }
}

TEST(DatasetCsv, RoundTripAndErrors) {
  const Dataset ds = generate_dataset(PlantConfig::defaults(), {short_profile(2, 0.5)}, 60.0);
  std::stringstream buf;
  write_dataset_csv(buf, ds);
  std::string header;
  std::getline(std::istringstream(buf.str()) >> std::ws, header);
  EXPECT_EQ(header, kDatasetCsvHeader);
  const Dataset back = read_dataset_csv(buf);
  ASSERT_EQ(back.size(), ds.size());
  EXPECT_EQ(back.split, ds.split);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_LT(quat_angle_error(back.samples[i].q01, ds.samples[i].q01), 1e-8);
    EXPECT_NEAR(back.samples[i].theta1, ds.samples[i].theta1, 1e-8);
    EXPECT_EQ(back.samples[i].profile_id, 2);
  }
  std::istringstream bad_header("t,q\n");
  EXPECT_THROW(read_dataset_csv(bad_header), FormatError);
  std::istringstream bad_split(std::string(kDatasetCsvHeader) + "\n0,1,0,0,0,0,0,0,val\n");
  EXPECT_THROW(read_dataset_csv(bad_split), FormatError);
  std::istringstream short_row(std::string(kDatasetCsvHeader) + "\n0,1,0,0\n");
  EXPECT_THROW(read_dataset_csv(short_row), FormatError);
}

}  // namespace
}  // namespace spm
