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

#ifndef PSNET_BENCH_HPP_
#define PSNET_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psnet/core.hpp"
#include "psnet/features.hpp"
#include "psnet/psnet.hpp"
#include "psnet/structuring.hpp"
#include "psnet/training.hpp"

// Timing harness and the experiment drivers built on it.
namespace psnet::bench {

enum class BenchMethod { kFps, kKnn, kBallQuery, kFpsKnn, kPsnet, kRandom };

std::string_view bench_method_name(BenchMethod method);
BenchMethod parse_bench_method(std::string_view name);

struct BenchConfig {
  BenchMethod method = BenchMethod::kPsnet;
  std::size_t m = 1024;
  std::size_t s = 512;
  std::size_t n = 32;
  std::size_t repeats = 5;
  std::size_t warmup = 1;
  int threads = 1;
  std::uint64_t seed = 0;
  FeatureMode features = FeatureMode::kSpherical;   // psnet only
  double ball_radius = 0.2;                         // ball_query only
};

struct TimingStats {
  BenchConfig config;
  double median_us = 0.0;
  double mean_us = 0.0;
  double min_us = 0.0;
  double max_us = 0.0;
  double std_us = 0.0;
  std::vector<double> samples_us;
  /// Hash of the discarded structuring output, equal across every call.
  std::uint64_t checksum = 0;
  bool checksums_consistent = true;
};

/// Summary statistics of raw per-call durations (population std).
TimingStats summarize(const BenchConfig& cfg, std::vector<double> samples_us);

/// Warmup rounds, then cfg.repeats timed calls on the same input.
/// knn and ball_query group around fps centres computed before timing.
/// Throws ConfigMismatch when the cloud size differs from cfg.m, when params
/// are given for a method other than psnet (or missing for psnet), or when
/// their shape does not match s and the feature mode.
TimingStats time_structuring(const BenchConfig& cfg, const PointCloud& cloud,
                             const std::optional<SftfParams>& params = std::nullopt);

/// Uniform points in [-1, 1]^3.
PointCloud bench_cloud(std::size_t m, std::uint64_t seed);
/// Random SFTF weights with the default channel list for (mode, s).
SftfParams bench_params(std::size_t s, FeatureMode mode, std::uint64_t seed);

struct ExponentFit {
  std::string method;
  double exponent = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(time) on log(m). Throws InsufficientGrid when fewer
/// than 3 distinct m values are given.
ExponentFit fit_exponent(std::string method, std::span<const double> m, std::span<const double> time_us);

struct ScalingCell {
  std::string method;
  std::size_t m = 0, s = 0, n = 0;
  int threads = 1;
  double median_us = 0.0;
  double mean_us = 0.0;
  double std_us = 0.0;
  /// fps_knn median over this median for the same (m, s, n, threads).
  std::optional<double> speedup_vs_fps_knn;
};

struct ScalingReport {
  std::vector<ScalingCell> cells;
  std::vector<ExponentFit> fits;
};

/// Per-method exponent fits plus speedup ratios. Every method needs at least
/// three m values at one fixed (s, n), otherwise InsufficientGrid.
ScalingReport scaling_report(std::span<const TimingStats> measurements);

/// Times every config on bench_cloud(m, seed) (and bench_params for psnet).
std::vector<TimingStats> run_grid(std::span<const BenchConfig> grid);

std::string scaling_report_to_json(const ScalingReport& report);

struct SymmetryErrorReport {
  std::size_t error_areas = 0;
  std::size_t error_points = 0;
  std::size_t areas = 0;
  std::size_t group_size = 0;
  double rate = 0.0;   // error_points / (areas * group_size)
  FeatureMode mode = FeatureMode::kSpherical;
};

/// A member p of group j is an error point when |p - c_j| > kappa * rho_j,
/// where c_j is the sampling point and rho_j its distance to its n-th
/// nearest cloud point.
SymmetryErrorReport symmetry_error_rate(const StructuringResult& result, const PointCloud& cloud,
                                        double kappa = 2.0, FeatureMode mode = FeatureMode::kSpherical);

/// Sums counts over several shapes; rate is recomputed from the totals.
SymmetryErrorReport merge_reports(std::span<const SymmetryErrorReport> reports);

struct AblationArm {
  FeatureMode mode = FeatureMode::kSpherical;
  std::vector<SymmetryErrorReport> per_seed;   // summed over the test shapes
  std::vector<double> accuracy_per_seed;
  double mean_rate = 0.0;
  double mean_accuracy = 0.0;
};

struct AblationReport {
  double kappa = 2.0;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationArm> arms;   // one per feature mode, in request order

  const AblationArm& arm(FeatureMode mode) const;
};

/// Trains the same pipeline on mirror-symmetric shapes once per feature mode
/// and seed, then measures grouping errors and accuracy on the test shapes.
AblationReport ablation_theta_phi(const training::ToyTaskConfig& base, std::span<const std::uint64_t> seeds,
                                  double kappa = 2.0,
                                  std::span<const FeatureMode> modes = {});

std::string ablation_to_json(const AblationReport& report);

}  // namespace psnet::bench

#endif  // PSNET_BENCH_HPP_
