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

#include "psnet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "psnet/baselines.hpp"
#include "psnet/error.hpp"
#include "psnet/rng.hpp"

namespace psnet::bench {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t hash_indices(std::uint64_t h, std::span<const Index> values) {
  for (Index v : values) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= kFnvPrime;
    }
  }
  return h;
}

std::uint64_t hash_result(const StructuringResult& r) {
  return hash_indices(hash_indices(kFnvOffset, r.sample_indices), r.groups.data());
}

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorCode::kConfigMismatch, what); }

}  // namespace

std::string_view bench_method_name(BenchMethod method) {
  switch (method) {
    case BenchMethod::kFps: return "fps";
    case BenchMethod::kKnn: return "knn";
    case BenchMethod::kBallQuery: return "ball_query";
    case BenchMethod::kFpsKnn: return "fps_knn";
    case BenchMethod::kPsnet: return "psnet";
    case BenchMethod::kRandom: return "random";
  }
  return "unknown";
}

BenchMethod parse_bench_method(std::string_view name) {
  for (BenchMethod m : {BenchMethod::kFps, BenchMethod::kKnn, BenchMethod::kBallQuery, BenchMethod::kFpsKnn,
                        BenchMethod::kPsnet, BenchMethod::kRandom})
    if (bench_method_name(m) == name) return m;
  throw Error(ErrorCode::kInvalidArgument, "unknown bench method '" + std::string(name) + "'");
}

TimingStats summarize(const BenchConfig& cfg, std::vector<double> samples_us) {
  if (samples_us.empty()) throw Error(ErrorCode::kInvalidArgument, "no timing samples");
  TimingStats st;
  st.config = cfg;
  st.samples_us = samples_us;
  std::sort(samples_us.begin(), samples_us.end());
  const std::size_t k = samples_us.size();
  st.min_us = samples_us.front();
  st.max_us = samples_us.back();
  st.median_us = k % 2 ? samples_us[k / 2] : 0.5 * (samples_us[k / 2 - 1] + samples_us[k / 2]);
  st.mean_us = std::accumulate(samples_us.begin(), samples_us.end(), 0.0) / static_cast<double>(k);
  double var = 0.0;
  for (double v : samples_us) var += (v - st.mean_us) * (v - st.mean_us);
  st.std_us = std::sqrt(var / static_cast<double>(k));
  return st;
}

TimingStats time_structuring(const BenchConfig& cfg, const PointCloud& cloud,
                             const std::optional<SftfParams>& params) {
  if (cfg.repeats < 3) mismatch("repeats must be at least 3");
  if (cfg.warmup < 1) mismatch("warmup must be at least 1");
  if (cloud.size() != cfg.m)
    mismatch("cloud has " + std::to_string(cloud.size()) + " points, config expects " + std::to_string(cfg.m));
  if (cfg.s == 0 || cfg.s > cfg.m) mismatch("s must lie in [1, m]");
  if (cfg.n == 0 || cfg.n > cfg.m) mismatch("n must lie in [1, m]");
  const bool is_psnet = cfg.method == BenchMethod::kPsnet;
  if (is_psnet != params.has_value()) mismatch("SFTF params are required for psnet and only for psnet");
  if (is_psnet) {
    if (params->num_areas() != cfg.s) mismatch("params produce " + std::to_string(params->num_areas()) + " areas, s is " +
                                               std::to_string(cfg.s));
    if (params->input_width() != feature_width(cfg.features)) mismatch("params input width does not match the feature mode");
  }

  std::vector<Index> centers;
  if (cfg.method == BenchMethod::kKnn || cfg.method == BenchMethod::kBallQuery) centers = baselines::fps(cloud, cfg.s);

  auto run_once = [&]() -> std::uint64_t {
    switch (cfg.method) {
      case BenchMethod::kFps:
        return hash_indices(kFnvOffset, baselines::fps(cloud, cfg.s));
      case BenchMethod::kKnn:
        return hash_result(make_result(cloud, centers, baselines::knn_group(cloud, centers, cfg.n, cfg.threads)));
      case BenchMethod::kBallQuery:
        return hash_result(make_result(
            cloud, centers, baselines::ball_query(cloud, centers, {cfg.ball_radius, cfg.n}, cfg.threads)));
      case BenchMethod::kFpsKnn:
        return hash_result(baselines::fps_knn_pipeline(cloud, cfg.s, cfg.n, 0, cfg.threads));
      case BenchMethod::kPsnet:
        return hash_result(structure(cloud, *params, cfg.n, {cfg.features, cfg.threads}));
      case BenchMethod::kRandom: {
        SeededRng rng(cfg.seed);
        return hash_indices(kFnvOffset, baselines::random_sample(cloud, cfg.s, rng));
      }
    }
    return 0;
  };

  std::uint64_t checksum = 0;
  for (std::size_t w = 0; w < cfg.warmup; ++w) checksum = run_once();
  bool consistent = true;
  std::vector<double> samples;
  samples.reserve(cfg.repeats);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t h = run_once();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    consistent = consistent && h == checksum;
  }
  TimingStats st = summarize(cfg, std::move(samples));
  st.checksum = checksum;
  st.checksums_consistent = consistent;
  return st;
}

PointCloud bench_cloud(std::size_t m, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<Point3> pts(m);
  for (auto& p : pts) p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return PointCloud(std::move(pts));
}

SftfParams bench_params(std::size_t s, FeatureMode mode, std::uint64_t seed) {
  SeededRng rng = SeededRng(seed).child(0xB3);
  return SftfParams::random(default_channels(feature_width(mode), s), rng);
}

ExponentFit fit_exponent(std::string method, std::span<const double> m, std::span<const double> time_us) {
  if (m.size() != time_us.size()) throw Error(ErrorCode::kShapeMismatch, "m and time lists differ in length");
  if (std::set<double>(m.begin(), m.end()).size() < 3)
    throw Error(ErrorCode::kInsufficientGrid, "method " + method + " needs at least 3 distinct m values");
  const std::size_t k = m.size();
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(m[i] > 0.0) || !(time_us[i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "m and times must be positive");
    x[i] = std::log(m[i]);
    y[i] = std::log(time_us[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(k);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  ExponentFit fit;
  fit.method = std::move(method);
  fit.exponent = sxy / sxx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ScalingReport scaling_report(std::span<const TimingStats> measurements) {
  ScalingReport report;
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, int>;
  std::map<Key, double> fps_knn;
  for (const auto& t : measurements)
    if (t.config.method == BenchMethod::kFpsKnn)
      fps_knn[{t.config.m, t.config.s, t.config.n, t.config.threads}] = t.median_us;

  std::vector<std::string> order;
  std::map<std::string, std::vector<const TimingStats*>> by_method;
  for (const auto& t : measurements) {
    const std::string name(bench_method_name(t.config.method));
    if (!by_method.count(name)) order.push_back(name);
    by_method[name].push_back(&t);
    ScalingCell cell{name, t.config.m, t.config.s, t.config.n, t.config.threads, t.median_us, t.mean_us, t.std_us, {}};
    const auto it = fps_knn.find({t.config.m, t.config.s, t.config.n, t.config.threads});
    if (it != fps_knn.end()) cell.speedup_vs_fps_knn = it->second / t.median_us;
    report.cells.push_back(cell);
  }
  for (const auto& name : order) {
    const auto& rows = by_method[name];
    for (const auto* t : rows)
      if (t->config.s != rows.front()->config.s || t->config.n != rows.front()->config.n)
        throw Error(ErrorCode::kInsufficientGrid, "method " + name + " mixes several (s, n) settings");
    std::vector<double> ms, ts;
    for (const auto* t : rows) {
      ms.push_back(static_cast<double>(t->config.m));
      ts.push_back(t->median_us);
    }
    report.fits.push_back(fit_exponent(name, ms, ts));
  }
  return report;
}

std::vector<TimingStats> run_grid(std::span<const BenchConfig> grid) {
  std::vector<TimingStats> out;
  std::map<std::pair<std::size_t, std::uint64_t>, PointCloud> clouds;
  for (const auto& cfg : grid) {
    auto it = clouds.find({cfg.m, cfg.seed});
    if (it == clouds.end()) it = clouds.emplace(std::pair{cfg.m, cfg.seed}, bench_cloud(cfg.m, cfg.seed)).first;
    std::optional<SftfParams> params;
    if (cfg.method == BenchMethod::kPsnet) params = bench_params(cfg.s, cfg.features, cfg.seed);
    out.push_back(time_structuring(cfg, it->second, params));
  }
  return out;
}

std::string scaling_report_to_json(const ScalingReport& report) {
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json row = {{"method", c.method}, {"m", c.m},           {"s", c.s},
                          {"n", c.n},           {"threads", c.threads}, {"median_us", c.median_us},
                          {"mean_us", c.mean_us}, {"std_us", c.std_us}};
    row["speedup_vs_fps_knn"] = c.speedup_vs_fps_knn ? nlohmann::json(*c.speedup_vs_fps_knn) : nlohmann::json();
    timings.push_back(std::move(row));
  }
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : report.fits) fits.push_back({{"method", f.method}, {"exponent", f.exponent}, {"r2", f.r2}});
  return nlohmann::json{{"timings", timings}, {"fits", fits}}.dump(2);
}

SymmetryErrorReport symmetry_error_rate(const StructuringResult& result, const PointCloud& cloud, double kappa,
                                        FeatureMode mode) {
  SymmetryErrorReport rep;
  rep.mode = mode;
  rep.areas = result.num_samples();
  rep.group_size = result.group_size();
  if (rep.areas == 0 || rep.group_size == 0) return rep;
  const IndexTable radius_table = baselines::knn_group(cloud, result.sample_indices, rep.group_size);
  for (std::size_t j = 0; j < rep.areas; ++j) {
    const Point3& c = cloud[result.sample_indices[j]];
    const double rho2 = squared_distance(c, cloud[radius_table(j, rep.group_size - 1)]);
    const double limit = kappa * kappa * rho2;
    std::size_t bad = 0;
    for (Index p : result.groups.row(j))
      if (squared_distance(cloud[p], c) > limit) ++bad;
    rep.error_points += bad;
    if (bad) ++rep.error_areas;
  }
  rep.rate = static_cast<double>(rep.error_points) / static_cast<double>(rep.areas * rep.group_size);
  return rep;
}

SymmetryErrorReport merge_reports(std::span<const SymmetryErrorReport> reports) {
  SymmetryErrorReport out;
  std::size_t slots = 0;
  for (const auto& r : reports) {
    out.mode = r.mode;
    out.error_areas += r.error_areas;
    out.error_points += r.error_points;
    out.areas += r.areas;
    out.group_size = r.group_size;
    slots += r.areas * r.group_size;
  }
  out.rate = slots ? static_cast<double>(out.error_points) / static_cast<double>(slots) : 0.0;
  return out;
}

const AblationArm& AblationReport::arm(FeatureMode mode) const {
  for (const auto& a : arms)
    if (a.mode == mode) return a;
  throw Error(ErrorCode::kInvalidArgument, "feature mode not part of this ablation");
}

AblationReport ablation_theta_phi(const training::ToyTaskConfig& base, std::span<const std::uint64_t> seeds,
                                  double kappa, std::span<const FeatureMode> modes) {
  static constexpr FeatureMode kAll[] = {FeatureMode::kSpherical, FeatureMode::kCartesian, FeatureMode::kAnglesOnly};
  if (modes.empty()) modes = kAll;
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "ablation needs at least one seed");
  AblationReport report;
  report.kappa = kappa;
  report.seeds.assign(seeds.begin(), seeds.end());
  for (FeatureMode mode : modes) {
    AblationArm arm;
    arm.mode = mode;
    for (std::uint64_t seed : seeds) {
      training::ToyTaskConfig cfg = base;
      cfg.seed = seed;
      cfg.features = mode;
      cfg.symmetric_shapes = true;
      const synth::Dataset data = training::synth_dataset(cfg);
      const training::TrainResult trained = training::train(cfg, data);
      std::vector<SymmetryErrorReport> shapes;
      SeededRng rng(seed);
      for (const auto& shape : data.test) {
        const StructuringResult r = training::structure_for(trained.model, shape.cloud, cfg, rng);
        shapes.push_back(symmetry_error_rate(r, shape.cloud, kappa, mode));
      }
      SymmetryErrorReport merged = merge_reports(shapes);
      merged.mode = mode;
      arm.per_seed.push_back(merged);
      arm.accuracy_per_seed.push_back(trained.final_test_acc());
    }
    const double k = static_cast<double>(seeds.size());
    for (const auto& r : arm.per_seed) arm.mean_rate += r.rate / k;
    for (double a : arm.accuracy_per_seed) arm.mean_accuracy += a / k;
    report.arms.push_back(std::move(arm));
  }
  return report;
}

std::string ablation_to_json(const AblationReport& report) {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& a : report.arms) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (std::size_t i = 0; i < a.per_seed.size(); ++i) {
      const auto& r = a.per_seed[i];
      per_seed.push_back({{"seed", report.seeds[i]},
                          {"error_areas", r.error_areas},
                          {"error_points", r.error_points},
                          {"areas", r.areas},
                          {"group_size", r.group_size},
                          {"grouping_error_rate", r.rate},
                          {"test_acc", a.accuracy_per_seed[i]}});
    }
    arms.push_back({{"feature_mode", feature_mode_name(a.mode)},
                    {"d", feature_width(a.mode)},
                    {"mean_grouping_error_rate", a.mean_rate},
                    {"mean_test_acc", a.mean_accuracy},
                    {"per_seed", per_seed}});
  }
  return nlohmann::json{{"kappa", report.kappa}, {"arms", arms}}.dump(2);
}

}  // namespace psnet::bench
