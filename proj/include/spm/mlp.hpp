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

// Single-hidden-layer perceptron that maps a chassis-relative quaternion
// (w, x, y, z) to the two servo angles, trained from scratch with Adam.
//
//   x_n = (q - mean) / scale
//   h   = tanh(W1^T x_n + b1)        W1: 4 x H
//   y   = W2 h + b2                  W2: 2 x H
//
// Parameters live in one flat vector [W1 | b1 | W2 | b2], row-major.
// Loss is the mean squared error over both outputs, in radians.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spm/kinematics.hpp"
#include "spm/plant.hpp"
#include "spm/rotation.hpp"

namespace spm {

struct AdamParams {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct MlpHyperparams {
  std::size_t hidden_units = 2700;
  std::string activation = "tanh";
  /// Relative epoch-loss improvement that counts as progress.
  double tolerance = 1e-3;
  /// Epoch cap.
  int max_iterations = 1000;
  /// Consecutive epochs without progress before stopping.
  int patience = 10;
  AdamParams adam;
  std::size_t batch_size = 256;
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument.
  void validate() const;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n, const AdamParams& params);

  /// One bias-corrected step over all parameters.
  void step(std::span<double> params, std::span<const double> grad);

  long steps() const { return t_; }

 private:
  AdamParams p_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

struct TrainingInfo {
  /// Mean training loss of the last epoch run and of the epoch whose
  /// weights were kept.
  double final_loss = 0.0;
  double best_loss = 0.0;
  int iterations = 0;
  int best_epoch = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  std::vector<double> loss_history;
};

struct IkModel {
  std::array<double, 4> input_mean{};
  std::array<double, 4> input_scale{1.0, 1.0, 1.0, 1.0};
  std::size_t hidden = 0;
  std::vector<double> params;
  MlpHyperparams hyperparams;
  TrainingInfo training;

  const double* w1() const { return params.data(); }
  const double* b1() const { return params.data() + 4 * hidden; }
  const double* w2() const { return params.data() + 5 * hidden; }
  const double* b2() const { return params.data() + 7 * hidden; }

  /// Throws std::invalid_argument on a size mismatch, a non-finite weight or
  /// a non-positive scale.
  void validate() const;
};

std::size_t parameter_count(std::size_t hidden);

/// Glorot-uniform weights and biases, identity normalization.
IkModel make_untrained_model(std::size_t hidden, std::uint64_t seed);

/// Canonicalized and normalized network input.
std::array<double, 4> normalize_input(const IkModel& model, const UnitQuaternion& q);

/// Loss over a batch of already-normalized inputs; `grad` receives its
/// gradient with respect to model.params.
double loss_and_gradient(const IkModel& model, std::span<const std::array<double, 4>> inputs,
                         std::span<const std::array<double, 2>> targets, std::vector<double>& grad);

/// Trains on the dataset's train split. Throws std::invalid_argument when
/// that split is empty and DivergedError when the loss stops being finite.
/// The returned weights are those of the lowest-loss epoch.
IkModel train(const Dataset& dataset, const MlpHyperparams& hp);

/// Single forward pass. Pure and thread-safe.
ActuatorAngles predict(const IkModel& model, const UnitQuaternion& q01);

using IkPredictor = std::function<ActuatorAngles(const UnitQuaternion&)>;

/// Closed-form inverse kinematics of the nominal design applied to the
/// end-effector normal of q01. Throws like inverse_kinematics.
ActuatorAngles analytic_ik(const UnitQuaternion& q01);

struct EvalReport {
  std::string dataset_id;
  double mae_theta1_deg = 0.0;
  double mae_theta2_deg = 0.0;
  /// predicted - recorded, degrees, in dataset order.
  std::vector<double> residual_theta1_deg;
  std::vector<double> residual_theta2_deg;
  std::vector<double> t;
};

/// Throws std::invalid_argument when the split is empty.
EvalReport evaluate(const IkPredictor& predictor, const Dataset& dataset, Split split = Split::kTest,
                    const std::string& dataset_id = {});
EvalReport evaluate(const IkModel& model, const Dataset& dataset, Split split = Split::kTest,
                    const std::string& dataset_id = {});

/// CSV: t_s,residual_theta1_deg,residual_theta2_deg
void write_residuals_csv(std::ostream& out, const EvalReport& report);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model file. Weights are written with round-trip precision.
void save_model(const std::string& path, const IkModel& model);
/// Throws FormatError on unreadable or malformed input, VersionError on an
/// unsupported format version.
IkModel load_model(const std::string& path);
std::string model_to_string(const IkModel& model);
IkModel model_from_string(const std::string& text);

}  // namespace spm
