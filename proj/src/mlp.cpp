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

#include "spm/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "spm/errors.hpp"
#include "spm/simd/kernels.hpp"

namespace spm {
namespace {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

void MlpHyperparams::validate() const {
  if (hidden_units < 1) throw std::invalid_argument("hidden_units must be >= 1");
  if (activation != "tanh") throw std::invalid_argument("unsupported activation '" + activation + "'");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(adam.step_size > 0.0)) throw std::invalid_argument("adam step size must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must be in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("adam epsilon must be > 0");
}

AdamOptimizer::AdamOptimizer(std::size_t n, const AdamParams& params)
    : p_(params), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("AdamOptimizer::step: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 / (1.0 - std::pow(p_.beta1, static_cast<double>(t_)));
  const double c2 = 1.0 / (1.0 - std::pow(p_.beta2, static_cast<double>(t_)));
  simd::active_kernels().adam_update(params.data(), grad.data(), m_.data(), v_.data(), m_.size(),
                                     p_.step_size, p_.beta1, p_.beta2, c1, c2, p_.epsilon);
}

std::size_t parameter_count(std::size_t hidden) { return 7 * hidden + 2; }

void IkModel::validate() const {
  if (hidden < 1 || params.size() != parameter_count(hidden)) {
    throw std::invalid_argument("IkModel: parameter vector does not match hidden size");
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw std::invalid_argument("IkModel: non-finite weight");
  }
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(input_mean[i]) || !(input_scale[i] > 0.0) || !std::isfinite(input_scale[i])) {
      throw std::invalid_argument("IkModel: invalid input normalization");
    }
  }
}

IkModel make_untrained_model(std::size_t hidden, std::uint64_t seed) {
  if (hidden < 1) throw std::invalid_argument("hidden units must be >= 1");
  IkModel m;
  m.hidden = hidden;
  m.hyperparams.hidden_units = hidden;
  m.hyperparams.rng_seed = seed;
  m.params.resize(parameter_count(hidden));
  std::mt19937_64 rng(seed);
  const double h = static_cast<double>(hidden);
  const double lim1 = std::sqrt(6.0 / (4.0 + h));
  const double lim2 = std::sqrt(6.0 / (h + 2.0));
  const std::size_t n1 = 5 * hidden;  // W1 and b1
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    const double lim = i < n1 ? lim1 : lim2;
    m.params[i] = lim * (2.0 * unit_uniform(rng) - 1.0);
  }
  return m;
}

std::array<double, 4> normalize_input(const IkModel& model, const UnitQuaternion& q) {
  // UnitQuaternion is always canonical, so q and -q give the same input.
  const auto c = q.wxyz();
  std::array<double, 4> x;
  for (int i = 0; i < 4; ++i) x[i] = (c[i] - model.input_mean[i]) / model.input_scale[i];
  return x;
}

double loss_and_gradient(const IkModel& model, std::span<const std::array<double, 4>> inputs,
                         std::span<const std::array<double, 2>> targets, std::vector<double>& grad) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw std::invalid_argument("loss_and_gradient: empty or mismatched batch");
  }
  const auto& k = simd::active_kernels();
  const std::size_t H = model.hidden;
  grad.assign(model.params.size(), 0.0);
  double* gw1 = grad.data();
  double* gb1 = gw1 + 4 * H;
  double* gw2 = gw1 + 5 * H;
  double* gb2 = gw1 + 7 * H;
  std::vector<double> h(H);
  const double inv_b = 1.0 / static_cast<double>(inputs.size());
  double sse = 0.0;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    double y[2];
    k.hidden_forward(inputs[s].data(), model.w1(), model.b1(), h.data(), H);
    k.output_forward(h.data(), model.w2(), model.b2(), y, H);
    const double e0 = y[0] - targets[s][0];
    const double e1 = y[1] - targets[s][1];
    sse += e0 * e0 + e1 * e1;
    const double dy[2] = {e0 * inv_b, e1 * inv_b};
    k.hidden_backward(inputs[s].data(), h.data(), dy, model.w2(), gw1, gb1, gw2, H);
    gb2[0] += dy[0];
    gb2[1] += dy[1];
  }
  // L = sum(e^2) / (2B): the mean over both outputs and the batch.
  return 0.5 * sse * inv_b;
}

IkModel train(const Dataset& dataset, const MlpHyperparams& hp) {
  hp.validate();
  const auto idx = dataset.indices(Split::kTrain);
  if (idx.empty()) throw std::invalid_argument("train: the train split is empty");
  const auto t_start = std::chrono::steady_clock::now();

  IkModel model = make_untrained_model(hp.hidden_units, hp.rng_seed);
  model.hyperparams = hp;

  // Feature normalization over the train split.
  const std::size_t n = idx.size();
  std::array<double, 4> mean{}, var{};
  for (std::size_t i : idx) {
    const auto c = dataset.samples[i].q01.wxyz();
    for (int j = 0; j < 4; ++j) mean[j] += c[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t i : idx) {
    const auto c = dataset.samples[i].q01.wxyz();
    for (int j = 0; j < 4; ++j) var[j] += (c[j] - mean[j]) * (c[j] - mean[j]);
  }
  model.input_mean = mean;
  for (int j = 0; j < 4; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    model.input_scale[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<std::array<double, 4>> x(n);
  std::vector<std::array<double, 2>> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = dataset.samples[idx[i]];
    x[i] = normalize_input(model, s.q01);
    y[i] = {s.theta1, s.theta2};
  }

  const auto& k = simd::active_kernels();
  const std::size_t H = model.hidden;
  const std::size_t P = model.params.size();
  AdamOptimizer adam(P, hp.adam);
  std::vector<double> grad(P), h(H), best = model.params;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(hp.rng_seed ^ 0x9e3779b97f4a7c15ULL);

  TrainingInfo info;
  double best_loss = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int epoch = 1; epoch <= hp.max_iterations; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    double sse = 0.0;
    for (std::size_t start = 0; start < n; start += hp.batch_size) {
      const std::size_t end = std::min(n, start + hp.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double* gw1 = grad.data();
      double* gb1 = gw1 + 4 * H;
      double* gw2 = gw1 + 5 * H;
      double* gb2 = gw1 + 7 * H;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t s = order[b];
        double out[2];
        k.hidden_forward(x[s].data(), model.w1(), model.b1(), h.data(), H);
        k.output_forward(h.data(), model.w2(), model.b2(), out, H);
        const double e0 = out[0] - y[s][0];
        const double e1 = out[1] - y[s][1];
        sse += e0 * e0 + e1 * e1;
        const double dy[2] = {e0 * inv_b, e1 * inv_b};
        k.hidden_backward(x[s].data(), h.data(), dy, model.w2(), gw1, gb1, gw2, H);
        gb2[0] += dy[0];
        gb2[1] += dy[1];
      }
      adam.step(model.params, grad);
    }
    const double loss = 0.5 * sse / static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw DivergedError("training loss became non-finite at epoch " + std::to_string(epoch) +
                          "; reduce the Adam step size");
    }
    info.loss_history.push_back(loss);
    info.iterations = epoch;
    info.final_loss = loss;
    if (loss < best_loss * (1.0 - hp.tolerance)) {
      stall = 0;
    } else {
      ++stall;
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = model.params;
      info.best_epoch = epoch;
    }
    if (stall >= hp.patience) {
      info.converged = true;
      break;
    }
  }
  model.params = std::move(best);
  info.best_loss = best_loss;
  info.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  model.training = std::move(info);
  return model;
}

ActuatorAngles predict(const IkModel& model, const UnitQuaternion& q01) {
  thread_local std::vector<double> h;
  h.resize(model.hidden);
  const auto x = normalize_input(model, q01);
  const auto& k = simd::active_kernels();
  double y[2];
  k.hidden_forward(x.data(), model.w1(), model.b1(), h.data(), model.hidden);
  k.output_forward(h.data(), model.w2(), model.b2(), y, model.hidden);
  return {y[0], y[1]};
}

ActuatorAngles analytic_ik(const UnitQuaternion& q01) {
  return inverse_kinematics(q01.rotate(Vec3::UnitZ()));
}

EvalReport evaluate(const IkPredictor& predictor, const Dataset& dataset, Split split,
                    const std::string& dataset_id) {
  const auto idx = dataset.indices(split);
  if (idx.empty()) throw std::invalid_argument("evaluate: the requested split is empty");
  EvalReport r;
  r.dataset_id = dataset_id;
  r.residual_theta1_deg.reserve(idx.size());
  r.residual_theta2_deg.reserve(idx.size());
  r.t.reserve(idx.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i : idx) {
    const Sample& s = dataset.samples[i];
    const ActuatorAngles p = predictor(s.q01);
    const double d1 = rad_to_deg(p.theta1 - s.theta1);
    const double d2 = rad_to_deg(p.theta2 - s.theta2);
    r.residual_theta1_deg.push_back(d1);
    r.residual_theta2_deg.push_back(d2);
    r.t.push_back(s.t);
    s1 += std::abs(d1);
    s2 += std::abs(d2);
  }
  r.mae_theta1_deg = s1 / static_cast<double>(idx.size());
  r.mae_theta2_deg = s2 / static_cast<double>(idx.size());
  return r;
}

EvalReport evaluate(const IkModel& model, const Dataset& dataset, Split split,
                    const std::string& dataset_id) {
  return evaluate([&model](const UnitQuaternion& q) { return predict(model, q); }, dataset, split,
                  dataset_id);
}

void write_residuals_csv(std::ostream& out, const EvalReport& report) {
  out << "t_s,residual_theta1_deg,residual_theta2_deg\n";
  char buf[96];
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", report.t[i], report.residual_theta1_deg[i],
                  report.residual_theta2_deg[i]);
    out << buf;
  }
}

}  // namespace spm
