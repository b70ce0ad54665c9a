// Copyright (c) 2026 The psnet Authors
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

// psnet command-line tool: structure, bench, train, ablate, export-viz.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psnet/baselines.hpp"
#include "psnet/bench.hpp"
#include "psnet/error.hpp"
#include "psnet/features.hpp"
#include "psnet/io.hpp"
#include "psnet/parallel.hpp"
#include "psnet/psnet.hpp"
#include "psnet/training.hpp"

namespace {

using namespace psnet;

struct Common {
  int threads = 0;
  std::uint64_t seed = 7;
};

int resolve_threads(int flag) { return flag > 0 ? flag : default_threads(); }

PointCloud load_cloud(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".ply" || ext == ".PLY") return io::load_ply(path).cloud;
  return io::load_xyz(path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t parse_size(const std::string& tok, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "invalid " + what + " '" + tok + "'");
  }
}

// "m=1024,4096,16384" -> {1024, 4096, 16384}
std::vector<std::size_t> parse_grid(const std::string& grid) {
  if (grid.rfind("m=", 0) != 0) throw Error(ErrorCode::kInvalidArgument, "grid must look like m=1024,4096,...");
  std::vector<std::size_t> ms;
  for (const auto& tok : split_list(grid.substr(2))) ms.push_back(parse_size(tok, "grid value"));
  return ms;
}

struct StructureArgs {
  std::string in, out, params, method = "psnet", features = "xyz_theta_phi";
  std::size_t s = 0, n = 32;
  double radius = 0.2;
};

StructuringResult run_structuring(const StructureArgs& a, const PointCloud& cloud, const Common& c) {
  const int threads = resolve_threads(c.threads);
  if (a.method == "psnet") {
    const FeatureMode mode = parse_feature_mode(a.features);
    SftfParams params;
    if (!a.params.empty()) {
      params = io::load_params(a.params);
      if (a.s != 0 && a.s != params.num_areas())
        throw Error(ErrorCode::kConfigMismatch, "--s " + std::to_string(a.s) + " but params define " +
                                                    std::to_string(params.num_areas()) + " areas");
    } else {
      if (a.s == 0) throw Error(ErrorCode::kInvalidArgument, "--s is required without --params");
      params = bench::bench_params(a.s, mode, c.seed);
    }
    if (params.input_width() != feature_width(mode))
      throw Error(ErrorCode::kConfigMismatch, "params expect " + std::to_string(params.input_width()) +
                                                  " input features, --features gives " +
                                                  std::to_string(feature_width(mode)));
    return structure(cloud, params, a.n, {mode, threads});
  }
  if (a.s == 0) throw Error(ErrorCode::kInvalidArgument, "--s is required");
  if (a.method == "fps_knn") return baselines::fps_knn_pipeline(cloud, a.s, a.n, 0, threads);
  if (a.method == "fps_ball_query") return baselines::fps_ball_query_pipeline(cloud, a.s, {a.radius, a.n}, 0, threads);
  if (a.method == "random_knn") {
    SeededRng rng(c.seed);
    auto samples = baselines::random_sample(cloud, a.s, rng);
    auto groups = baselines::knn_group(cloud, samples, a.n, threads);
    return make_result(cloud, std::move(samples), std::move(groups));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + a.method + "'");
}

void add_structure_flags(CLI::App* cmd, StructureArgs& a) {
  cmd->add_option("--in", a.in, "Input cloud (.xyz or ascii .ply)")->required();
  cmd->add_option("--s", a.s, "Number of sampling points / local areas");
  cmd->add_option("--n", a.n, "Group size");
  cmd->add_option("--params", a.params, "SFTF parameter file (psnet)");
  cmd->add_option("--method", a.method, "psnet | fps_knn | fps_ball_query | random_knn");
  cmd->add_option("--features", a.features, "xyz_theta_phi | xyz | r_theta_phi");
  cmd->add_option("--radius", a.radius, "Ball query radius");
}

void configure_toy(CLI::App* cmd, training::ToyTaskConfig& cfg, std::string& method, std::string& features) {
  cmd->add_option("--classes", cfg.classes, "Number of shape classes");
  cmd->add_option("--epochs", cfg.epochs, "Training epochs");
  cmd->add_option("--points", cfg.points, "Points per shape");
  cmd->add_option("--samples", cfg.samples, "Local areas per shape");
  cmd->add_option("--group-size", cfg.group_size, "Members per local area");
  cmd->add_option("--shapes-per-class", cfg.shapes_per_class, "Training shapes per class");
  cmd->add_option("--test-per-class", cfg.test_shapes_per_class, "Held-out shapes per class");
  cmd->add_option("--batch", cfg.batch_size, "Mini-batch size");
  cmd->add_option("--lr", cfg.learning_rate, "Learning rate");
  cmd->add_option("--method", method, "psnet | fps_knn | random_knn | psnet_sampling_ball_query");
  cmd->add_option("--features", features, "xyz_theta_phi | xyz | r_theta_phi");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned point cloud structuring and classical baselines"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: PSNET_THREADS or all cores)");
  app.add_option("--seed", common.seed, "Random seed");

  StructureArgs st;
  auto* structure_cmd = app.add_subcommand("structure", "Sample and group one cloud, write JSON");
  add_structure_flags(structure_cmd, st);
  structure_cmd->add_option("--out", st.out, "Output JSON path")->required();

  std::string grid = "m=1024,4096,16384", bench_methods = "psnet,fps_knn", bench_out, bench_features = "xyz_theta_phi";
  std::size_t bench_s = 512, bench_n = 32, repeats = 5, warmup = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Time structuring methods over a grid of cloud sizes");
  bench_cmd->add_option("--grid", grid, "Cloud sizes, e.g. m=1024,4096,16384");
  bench_cmd->add_option("--s", bench_s, "Number of sampling points");
  bench_cmd->add_option("--n", bench_n, "Group size");
  bench_cmd->add_option("--methods", bench_methods, "Comma list of fps,knn,ball_query,fps_knn,psnet,random");
  bench_cmd->add_option("--repeats", repeats, "Timed calls per cell (>= 3)");
  bench_cmd->add_option("--warmup", warmup, "Untimed warmup calls (>= 1)");
  bench_cmd->add_option("--features", bench_features, "Feature mode for psnet");
  bench_cmd->add_option("--out", bench_out, "Output JSON path")->required();

  training::ToyTaskConfig toy;
  std::string train_method = "psnet", train_features = "xyz_theta_phi", train_out;
  auto* train_cmd = app.add_subcommand("train", "Co-train SFTF and a toy classifier on synthetic shapes");
  configure_toy(train_cmd, toy, train_method, train_features);
  train_cmd->add_flag("--symmetric", toy.symmetric_shapes, "Use mirror-symmetric shape families");
  train_cmd->add_option("--out", train_out, "Output directory")->required();

  training::ToyTaskConfig ablate_cfg;
  std::string ablate_method = "psnet", ablate_features_unused = "xyz_theta_phi", ablate_out, ablate_seeds = "1,2,3";
  double kappa = 2.0;
  auto* ablate_cmd = app.add_subcommand("ablate", "Feature-set ablation on mirror-symmetric shapes");
  configure_toy(ablate_cmd, ablate_cfg, ablate_method, ablate_features_unused);
  ablate_cmd->add_option("--seeds", ablate_seeds, "Comma list of seeds");
  ablate_cmd->add_option("--kappa", kappa, "Error-point radius multiplier");
  ablate_cmd->add_option("--out", ablate_out, "Output JSON path")->required();

  StructureArgs viz;
  std::optional<std::size_t> viz_area;
  auto* viz_cmd = app.add_subcommand("export-viz", "Write a colored ascii PLY of one structuring pass");
  add_structure_flags(viz_cmd, viz);
  viz_cmd->add_option("--area", viz_area, "Highlight only this local area");
  viz_cmd->add_option("--out", viz.out, "Output PLY path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*structure_cmd) {
      const PointCloud cloud = load_cloud(st.in);
      io::write_text(st.out, io::result_to_json(run_structuring(st, cloud, common)));
    } else if (*bench_cmd) {
      std::vector<bench::BenchConfig> cells;
      for (std::size_t m : parse_grid(grid))
        for (const auto& name : split_list(bench_methods)) {
          bench::BenchConfig cfg;
          cfg.method = bench::parse_bench_method(name);
          cfg.m = m;
          cfg.s = bench_s;
          cfg.n = bench_n;
          cfg.repeats = repeats;
          cfg.warmup = warmup;
          cfg.threads = resolve_threads(common.threads);
          cfg.seed = common.seed;
          cfg.features = parse_feature_mode(bench_features);
          cells.push_back(cfg);
        }
      const auto timings = bench::run_grid(cells);
      const auto report = bench::scaling_report(timings);
      io::write_text(bench_out, bench::scaling_report_to_json(report));
      for (const auto& f : report.fits)
        std::cout << f.method << " exponent " << f.exponent << " (r2 " << f.r2 << ")\n";
    } else if (*train_cmd) {
      toy.seed = common.seed;
      toy.method = training::parse_method(train_method);
      toy.features = parse_feature_mode(train_features);
      const auto result = training::train(toy);
      std::filesystem::create_directories(train_out);
      const std::filesystem::path dir(train_out);
      io::write_text((dir / "metrics.json").string(), training::metrics_to_json(result.history));
      io::save_params((dir / "sftf.psnet").string(), result.model.sftf);
      std::cout << "final test accuracy " << result.final_test_acc() << "\n";
    } else if (*ablate_cmd) {
      ablate_cfg.method = training::parse_method(ablate_method);
      std::vector<std::uint64_t> seeds;
      for (const auto& tok : split_list(ablate_seeds)) seeds.push_back(parse_size(tok, "seed"));
      const auto report = bench::ablation_theta_phi(ablate_cfg, seeds, kappa);
      io::write_text(ablate_out, bench::ablation_to_json(report));
      for (const auto& arm : report.arms)
        std::cout << feature_mode_name(arm.mode) << " error rate " << arm.mean_rate << " accuracy "
                  << arm.mean_accuracy << "\n";
    } else if (*viz_cmd) {
      const PointCloud cloud = load_cloud(viz.in);
      const StructuringResult r = run_structuring(viz, cloud, common);
      io::save_ply(viz.out, cloud, io::visualization_colors(r, cloud.size(), viz_area));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
