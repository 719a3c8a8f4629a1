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

// spm: command-line front end for dataset generation, training, evaluation,
// tracking, singularity scans and loop benchmarks.
//
// Exit codes: 0 ok, 1 unexpected error, 2 configuration or input error,
// 3 plant singular during generation, 4 training diverged, 5 tracking
// failed, 6 scan failed, 7 benchmark failed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spm/config.hpp"
#include "spm/control.hpp"
#include "spm/dataset_io.hpp"
#include "spm/errors.hpp"
#include "spm/kinematics.hpp"
#include "spm/mlp.hpp"
#include "spm/plant.hpp"
#include "spm/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kPlantSingular = 3,
  kDiverged = 4,
  kTrack = 5,
  kScan = 6,
  kBench = 7,
};

struct Options {
  std::string config;
  std::string out;
  long long seed = -1;
  bool quiet = false;

  std::string plant;
  std::string profiles;
  std::string hyperparams;
  std::string dataset;
  std::string model;
  std::string mode;
  bool analytic = false;
  std::vector<double> alpha_deg;
  std::size_t grid = 0;
  std::size_t steps = 0;
};

class CommandError : public std::runtime_error {
 public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

spm::RunConfig build_run(const Options& o) {
  spm::RunConfig run = o.config.empty() ? spm::RunConfig{} : spm::load_run_config(o.config);
  if (!o.plant.empty()) run.plant = spm::load_plant_config(o.plant);
  if (!o.profiles.empty()) run.profiles = spm::load_profiles(o.profiles);
  if (!o.hyperparams.empty()) run.hyperparams = spm::load_hyperparams(o.hyperparams);
  if (!o.out.empty()) run.output_dir = o.out;
  if (o.seed >= 0) run.seed = static_cast<std::uint64_t>(o.seed);
  run.apply_seed();
  return run;
}

fs::path out_dir(const spm::RunConfig& run) {
  const fs::path dir(run.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw spm::ConfigError("cannot create output directory " + dir.string());
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

template <typename F>
void write_stream(const fs::path& path, F&& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  f(out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

spm::IkPredictor make_predictor(const Options& o, const fs::path& dir, spm::IkModel& storage) {
  if (o.analytic) return spm::analytic_ik;
  const std::string path = o.model.empty() ? (dir / "model.json").string() : o.model;
  storage = spm::load_model(path);
  return [&storage](const spm::UnitQuaternion& q) { return spm::predict(storage, q); };
}

int cmd_generate(const Options& o) {
  const spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  spm::Dataset ds;
  try {
    ds = spm::generate_dataset(run.plant, run.profiles.profiles, run.profiles.sample_rate_hz);
  } catch (const spm::PlantSingularError& e) {
    throw CommandError(kPlantSingular, std::string(e.what()) + " (profile " +
                                           std::to_string(e.profile_id()) + ")");
  }
  const fs::path csv = dir / (o.dataset.empty() ? "dataset.csv" : o.dataset);
  spm::save_dataset(csv.string(), ds);
  write_text(dir / "generate_manifest.json",
             spm::make_manifest("generate", run,
                                {{"dataset", csv.string()},
                                 {"sample_count", std::to_string(ds.size())},
                                 {"train_count", std::to_string(ds.count(spm::Split::kTrain))},
                                 {"test_count", std::to_string(ds.count(spm::Split::kTest))}}));
  if (!o.quiet) {
    std::cout << "samples: " << ds.size() << " (train " << ds.count(spm::Split::kTrain) << ", test "
              << ds.count(spm::Split::kTest) << ")\n";
  }
  std::cout << csv.string() << "\n" << (dir / "generate_manifest.json").string() << "\n";
  return kOk;
}

spm::Dataset load_input_dataset(const Options& o, const fs::path& dir) {
  const std::string path = o.dataset.empty() ? (dir / "dataset.csv").string() : o.dataset;
  try {
    return spm::load_dataset(path);
  } catch (const spm::FormatError& e) {
    throw spm::ConfigError(e.what());
  }
}

void print_mae(const char* label, const spm::EvalReport& r) {
  std::cout << label << " MAE theta1: " << fmt(r.mae_theta1_deg, "%.4f")
            << " deg  theta2: " << fmt(r.mae_theta2_deg, "%.4f") << " deg\n";
}

std::string report_json(const spm::EvalReport& r, std::size_t n) {
  std::ostringstream s;
  s << "{\n  \"dataset\": \"" << r.dataset_id << "\",\n  \"samples\": " << n
    << ",\n  \"mae_theta1_deg\": " << fmt(r.mae_theta1_deg, "%.17g")
    << ",\n  \"mae_theta2_deg\": " << fmt(r.mae_theta2_deg, "%.17g") << "\n}\n";
  return s.str();
}

int cmd_train(const Options& o) {
  const spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  const spm::Dataset ds = load_input_dataset(o, dir);
  if (ds.count(spm::Split::kTrain) == 0) throw spm::ConfigError("dataset has no train split");
  if (ds.count(spm::Split::kTest) == 0) throw spm::ConfigError("dataset has no test split");
  spm::IkModel model;
  try {
    model = spm::train(ds, run.hyperparams);
  } catch (const spm::DivergedError& e) {
    throw CommandError(kDiverged, e.what());
  }
  const auto report = spm::evaluate(model, ds, spm::Split::kTest, "test");
  const fs::path model_path = dir / (o.model.empty() ? "model.json" : o.model);
  spm::save_model(model_path.string(), model);
  write_text(dir / "eval_report.json", report_json(report, ds.count(spm::Split::kTest)));
  write_stream(dir / "residuals.csv", [&](std::ostream& s) { spm::write_residuals_csv(s, report); });
  write_text(dir / "train_manifest.json",
             spm::make_manifest("train", run,
                                {{"model", model_path.string()},
                                 {"epochs", std::to_string(model.training.iterations)},
                                 {"best_epoch", std::to_string(model.training.best_epoch)},
                                 {"mae_theta1_deg", fmt(report.mae_theta1_deg, "%.9g")},
                                 {"mae_theta2_deg", fmt(report.mae_theta2_deg, "%.9g")}}));
  if (!o.quiet) {
    std::cout << "epochs: " << model.training.iterations << " (best " << model.training.best_epoch
              << "), " << fmt(model.training.wall_time_s, "%.1f") << " s, kernels "
              << spm::simd::isa_name(spm::simd::active_kernels().isa) << "\n";
  }
  print_mae("test", report);
  std::cout << model_path.string() << "\n" << (dir / "eval_report.json").string() << "\n";
  return kOk;
}

int cmd_evaluate(const Options& o) {
  const spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  const spm::Dataset ds = load_input_dataset(o, dir);
  if (ds.count(spm::Split::kTest) == 0) throw spm::ConfigError("dataset has no test split");
  spm::IkModel storage;
  spm::IkPredictor predictor;
  try {
    predictor = make_predictor(o, dir, storage);
  } catch (const spm::Error& e) {
    throw spm::ConfigError(e.what());
  }
  const auto report = spm::evaluate(predictor, ds, spm::Split::kTest, "test");
  const std::string stem = o.analytic ? "analytic_" : "";
  write_text(dir / (stem + "evaluate_report.json"), report_json(report, ds.count(spm::Split::kTest)));
  write_stream(dir / (stem + "evaluate_residuals.csv"),
               [&](std::ostream& s) { spm::write_residuals_csv(s, report); });
  print_mae(o.analytic ? "analytic" : "model", report);
  std::cout << (dir / (stem + "evaluate_report.json")).string() << "\n";
  return kOk;
}

int cmd_track(const Options& o) {
  spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  spm::IkModel storage;
  spm::IkPredictor predictor;
  try {
    predictor = make_predictor(o, dir, storage);
  } catch (const spm::Error& e) {
    throw spm::ConfigError(e.what());
  }
  if (o.mode == "feasible") run.track_mode = spm::TrackMode::kFeasible;
  if (o.mode == "nominal") run.track_mode = spm::TrackMode::kNominal;
  if (o.mode == "home") run.track_mode = spm::TrackMode::kHome;
  try {
    const auto traj =
        run.track_mode == spm::TrackMode::kHome
            ? spm::home_trajectory(run.plant, run.track_duration_s, run.track_rate_hz)
            : spm::default_sweep(run.plant, run.track_duration_s, run.track_rate_hz,
                                 run.track_mode == spm::TrackMode::kNominal ? spm::SweepMode::kNominal
                                                                           : spm::SweepMode::kFeasible);
    const auto report = spm::track(predictor, run.plant, traj);
    write_stream(dir / "tracking.csv", [&](std::ostream& s) { spm::write_tracking_csv(s, report); });
    write_stream(dir / "endpoints.csv", [&](std::ostream& s) { spm::write_endpoint_csv(s, report); });
    write_text(dir / "track_manifest.json",
               spm::make_manifest("track", run,
                                  {{"predictor", o.analytic ? "analytic" : "model"},
                                   {"mae_phi_deg", fmt(report.mae_phi_deg, "%.9g")},
                                   {"mae_psi_deg", fmt(report.mae_psi_deg, "%.9g")},
                                   {"mae_theta_deg", fmt(report.mae_theta_deg, "%.9g")},
                                   {"unreachable_steps", std::to_string(report.unreachable_steps)}}));
    std::cout << "Euler MAE phi: " << fmt(report.mae_phi_deg, "%.4f")
              << " deg  psi: " << fmt(report.mae_psi_deg, "%.4f")
              << " deg  theta: " << fmt(report.mae_theta_deg, "%.4f") << " deg\n";
    if (!o.quiet) {
      std::cout << "steps: " << report.steps.size() << ", unreachable: " << report.unreachable_steps
                << ", loop " << fmt(report.loop_hz, "%.0f") << " Hz\n";
    }
  } catch (const spm::Error& e) {
    throw CommandError(kTrack, e.what());
  } catch (const std::invalid_argument& e) {
    throw CommandError(kTrack, e.what());
  }
  std::cout << (dir / "tracking.csv").string() << "\n" << (dir / "endpoints.csv").string() << "\n";
  return kOk;
}

int cmd_scan(const Options& o) {
  spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  if (!o.alpha_deg.empty()) {
    if (o.alpha_deg.size() != 5) throw spm::ConfigError("--alpha-deg needs 5 values");
    for (int i = 0; i < 5; ++i) run.scan_alpha_deg[i] = o.alpha_deg[i];
  }
  if (o.grid > 0) run.scan_grid_points = o.grid;
  spm::DesignParams params;
  for (int i = 0; i < 5; ++i) params.alpha[i] = spm::deg_to_rad(run.scan_alpha_deg[i]);
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw spm::ConfigError(e.what());
  }
  spm::ScanReport report;
  try {
    const double r = spm::deg_to_rad(run.scan_range_deg);
    report = spm::singularity_scan(params, spm::ActuatorGrid::uniform(run.scan_grid_points, -r, r));
  } catch (const std::exception& e) {
    throw CommandError(kScan, e.what());
  }
  write_stream(dir / "scan.csv", [&](std::ostream& s) { spm::write_scan_csv(s, report); });
  std::size_t flagged = 0;
  for (const auto& p : report.points) flagged += (p.singular || !p.reachable) ? 1 : 0;
  std::cout << "points: " << report.points.size() << "  reachable: " << report.reachable_count
            << "  singular or unreachable: " << flagged << "\n"
            << "min |sin theta5|: " << fmt(report.min_abs_sin_theta5, "%.10g")
            << "  max condition: " << fmt(report.max_condition_number, "%.10g") << "\n"
            << (dir / "scan.csv").string() << "\n";
  return kOk;
}

int cmd_bench(const Options& o) {
  spm::RunConfig run = build_run(o);
  const fs::path dir = out_dir(run);
  spm::IkModel storage;
  spm::IkPredictor predictor;
  try {
    predictor = make_predictor(o, dir, storage);
  } catch (const spm::Error& e) {
    throw spm::ConfigError(e.what());
  }
  const std::size_t steps = o.steps > 0 ? o.steps : run.bench_steps;
  double hz = 0.0;
  double latency_ms = 0.0;
  try {
    hz = spm::loop_benchmark(predictor, run.plant, steps);
    const auto traj = spm::default_sweep(run.plant, 10000.0 / 200.0, 200.0);
    std::vector<spm::UnitQuaternion> inputs;
    for (const auto& q : traj.orientation) inputs.push_back(spm::relative_rotation(run.plant.chassis_mount, q));
    double sink = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& q : inputs) sink += predictor(q).theta1;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    latency_ms = 1e3 * s / static_cast<double>(inputs.size());
    if (!std::isfinite(sink)) throw std::runtime_error("non-finite prediction");
  } catch (const std::exception& e) {
    throw CommandError(kBench, e.what());
  }
  write_text(dir / "bench_manifest.json",
             spm::make_manifest("bench", run,
                                {{"steps", std::to_string(steps)},
                                 {"loop_hz", fmt(hz, "%.6g")},
                                 {"predict_latency_ms", fmt(latency_ms, "%.6g")}}));
  std::cout << "loop rate: " << fmt(hz, "%.0f") << " Hz over " << steps << " steps\n"
            << "predict latency: " << fmt(latency_ms, "%.4f") << " ms\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical parallel manipulator kinematics and learned-IK toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "Run config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Seed override for plant noise, splits and training")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", o.out, "Output directory");
  app.add_flag("--quiet", o.quiet, "Only print results and artifact paths");

  auto* gen = app.add_subcommand("generate", "Sample the simulated plant into a dataset CSV");
  gen->add_option("--plant", o.plant, "Plant config (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--profiles", o.profiles, "Velocity profiles (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--dataset", o.dataset, "Output file name inside --out");

  auto* tr = app.add_subcommand("train", "Train the IK network and evaluate it on the test split");
  tr->add_option("--dataset", o.dataset, "Dataset CSV (default <out>/dataset.csv)");
  tr->add_option("--hyperparams", o.hyperparams, "Hyperparameters (JSON)")->check(CLI::ExistingFile);
  tr->add_option("--model", o.model, "Output model file name inside --out");

  auto* ev = app.add_subcommand("evaluate", "Per-joint MAE of a model on a dataset's test split");
  ev->add_option("--dataset", o.dataset, "Dataset CSV (default <out>/dataset.csv)");
  ev->add_option("--model", o.model, "Model file (default <out>/model.json)");
  ev->add_flag("--analytic", o.analytic, "Evaluate the closed-form IK instead of a model");

  auto* tk = app.add_subcommand("track", "Open-loop tracking of a desired orientation sweep");
  tk->add_option("--model", o.model, "Model file (default <out>/model.json)");
  tk->add_flag("--analytic", o.analytic, "Use the closed-form IK instead of a model");
  tk->add_option("--plant", o.plant, "Plant config (JSON)")->check(CLI::ExistingFile);
  tk->add_option("--mode", o.mode, "Desired trajectory")
      ->check(CLI::IsMember({"feasible", "nominal", "home"}));

  auto* sc = app.add_subcommand("scan", "Singularity scan over a servo-angle grid");
  sc->add_option("--alpha-deg", o.alpha_deg, "Five link twists in degrees")->expected(5);
  sc->add_option("--grid", o.grid, "Grid points per axis")->check(CLI::PositiveNumber);

  auto* bn = app.add_subcommand("bench", "Open-loop step rate and predict latency");
  bn->add_option("--model", o.model, "Model file (default <out>/model.json)");
  bn->add_flag("--analytic", o.analytic, "Use the closed-form IK instead of a model");
  bn->add_option("--plant", o.plant, "Plant config (JSON)")->check(CLI::ExistingFile);
  bn->add_option("--steps", o.steps, "Loop iterations (>= 1000)")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*tr) return cmd_train(o);
    if (*ev) return cmd_evaluate(o);
    if (*tk) return cmd_track(o);
    if (*sc) return cmd_scan(o);
    if (*bn) return cmd_bench(o);
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const spm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}
