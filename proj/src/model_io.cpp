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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spm/errors.hpp"
#include "spm/mlp.hpp"

namespace spm {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "spm-ik-model";

json hyperparams_json(const MlpHyperparams& hp) {
  return {{"hidden_units", hp.hidden_units},
          {"activation", hp.activation},
          {"tolerance", hp.tolerance},
          {"max_iterations", hp.max_iterations},
          {"patience", hp.patience},
          {"batch_size", hp.batch_size},
          {"rng_seed", hp.rng_seed},
          {"adam",
           {{"step_size", hp.adam.step_size},
            {"beta1", hp.adam.beta1},
            {"beta2", hp.adam.beta2},
            {"epsilon", hp.adam.epsilon}}}};
}

MlpHyperparams hyperparams_from(const json& j) {
  MlpHyperparams hp;
  hp.hidden_units = j.at("hidden_units").get<std::size_t>();
  hp.activation = j.at("activation").get<std::string>();
  hp.tolerance = j.at("tolerance").get<double>();
  hp.max_iterations = j.at("max_iterations").get<int>();
  hp.patience = j.at("patience").get<int>();
  hp.batch_size = j.at("batch_size").get<std::size_t>();
  hp.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  const json& a = j.at("adam");
  hp.adam.step_size = a.at("step_size").get<double>();
  hp.adam.beta1 = a.at("beta1").get<double>();
  hp.adam.beta2 = a.at("beta2").get<double>();
  hp.adam.epsilon = a.at("epsilon").get<double>();
  return hp;
}

std::vector<double> slice(const std::vector<double>& p, std::size_t off, std::size_t n) {
  return {p.begin() + static_cast<std::ptrdiff_t>(off), p.begin() + static_cast<std::ptrdiff_t>(off + n)};
}

}  // namespace

std::string model_to_string(const IkModel& model) {
  model.validate();
  const std::size_t H = model.hidden;
  json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["hyperparams"] = hyperparams_json(model.hyperparams);
  j["normalization"] = {{"mean", model.input_mean}, {"scale", model.input_scale}};
  const TrainingInfo& t = model.training;
  j["training"] = {{"final_loss", t.final_loss}, {"best_loss", t.best_loss},
                   {"iterations", t.iterations}, {"best_epoch", t.best_epoch},
                   {"wall_time_s", t.wall_time_s}, {"converged", t.converged},
                   {"loss_history", t.loss_history}};
  j["hidden"] = H;
  j["w1"] = slice(model.params, 0, 4 * H);
  j["b1"] = slice(model.params, 4 * H, H);
  j["w2"] = slice(model.params, 5 * H, 2 * H);
  j["b2"] = slice(model.params, 7 * H, 2);
  return j.dump(1) + "\n";
}

IkModel model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormatName) {
      throw FormatError("model file: missing or wrong format tag");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw VersionError("model file version " + std::to_string(version) +
                         " is not supported (this build reads version " +
                         std::to_string(kModelFormatVersion) + ")");
    }
    IkModel m;
    m.hyperparams = hyperparams_from(j.at("hyperparams"));
    m.input_mean = j.at("normalization").at("mean").get<std::array<double, 4>>();
    m.input_scale = j.at("normalization").at("scale").get<std::array<double, 4>>();
    const json& t = j.at("training");
    m.training.final_loss = t.at("final_loss").get<double>();
    m.training.best_loss = t.at("best_loss").get<double>();
    m.training.iterations = t.at("iterations").get<int>();
    m.training.best_epoch = t.at("best_epoch").get<int>();
    m.training.wall_time_s = t.at("wall_time_s").get<double>();
    m.training.converged = t.at("converged").get<bool>();
    m.training.loss_history = t.at("loss_history").get<std::vector<double>>();
    m.hidden = j.at("hidden").get<std::size_t>();
    const std::size_t H = m.hidden;
    const auto w1 = j.at("w1").get<std::vector<double>>();
    const auto b1 = j.at("b1").get<std::vector<double>>();
    const auto w2 = j.at("w2").get<std::vector<double>>();
    const auto b2 = j.at("b2").get<std::vector<double>>();
    if (w1.size() != 4 * H || b1.size() != H || w2.size() != 2 * H || b2.size() != 2) {
      throw FormatError("model file: weight sizes do not match hidden=" + std::to_string(H));
    }
    m.params.reserve(parameter_count(H));
    for (const auto* v : {&w1, &b1, &w2, &b2}) m.params.insert(m.params.end(), v->begin(), v->end());
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::string& path, const IkModel& model) {
  const std::string text = model_to_string(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

IkModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_string(ss.str());
}

}  // namespace spm
