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

#include <cmath>
#include <functional>

#include "doctest.h"
#include "json.hpp"
#include "psnet/baselines.hpp"
#include "psnet/bench.hpp"
#include "psnet/error.hpp"

using namespace psnet;
using namespace psnet::bench;

namespace {

TimingStats fake(BenchMethod method, std::size_t m, double median) {
  BenchConfig cfg;
  cfg.method = method;
  cfg.m = m;
  return summarize(cfg, {median, median, median});
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("summary statistics") {
  const TimingStats st = summarize({}, {5, 1, 3, 2});
  CHECK(st.min_us == 1);
  CHECK(st.max_us == 5);
  CHECK(st.median_us == 2.5);
  CHECK(st.mean_us == 2.75);
  CHECK(st.std_us == doctest::Approx(std::sqrt(2.1875)));
  CHECK(st.samples_us.size() == 4);
}

TEST_CASE("timing a trivial cloud orders its statistics") {
  const PointCloud c = bench_cloud(8, 1);
  for (BenchMethod m : {BenchMethod::kFps, BenchMethod::kKnn, BenchMethod::kBallQuery, BenchMethod::kFpsKnn,
                        BenchMethod::kRandom, BenchMethod::kPsnet}) {
    BenchConfig cfg;
    cfg.method = m;
    cfg.m = 8;
    cfg.s = 3;
    cfg.n = 2;
    cfg.repeats = 3;
    std::optional<SftfParams> p;
    if (m == BenchMethod::kPsnet) p = bench_params(3, cfg.features, 2);
    const TimingStats st = time_structuring(cfg, c, p);
    CHECK(st.min_us <= st.median_us);
    CHECK(st.median_us <= st.max_us);
    CHECK(st.samples_us.size() == 3);
    CHECK(st.checksums_consistent);
    CHECK(std::isfinite(st.std_us));
  }
}

TEST_CASE("time_structuring rejects inconsistent configs") {
  const PointCloud c = bench_cloud(16, 1);
  BenchConfig cfg;
  cfg.m = 16;
  cfg.s = 4;
  cfg.n = 2;
  cfg.method = BenchMethod::kFpsKnn;
  CHECK(code_of([&] { time_structuring(cfg, bench_cloud(17, 1)); }) == ErrorCode::kConfigMismatch);
  CHECK(code_of([&] { time_structuring(cfg, c, bench_params(4, cfg.features, 1)); }) == ErrorCode::kConfigMismatch);
  cfg.method = BenchMethod::kPsnet;
  CHECK(code_of([&] { time_structuring(cfg, c); }) == ErrorCode::kConfigMismatch);
  CHECK(code_of([&] { time_structuring(cfg, c, bench_params(5, cfg.features, 1)); }) == ErrorCode::kConfigMismatch);
  CHECK(code_of([&] { time_structuring(cfg, c, bench_params(4, FeatureMode::kCartesian, 1)); }) ==
        ErrorCode::kConfigMismatch);
  cfg.repeats = 2;
  CHECK(code_of([&] { time_structuring(cfg, c, bench_params(4, cfg.features, 1)); }) == ErrorCode::kConfigMismatch);
  cfg.repeats = 3;
  cfg.warmup = 0;
  CHECK(code_of([&] { time_structuring(cfg, c, bench_params(4, cfg.features, 1)); }) == ErrorCode::kConfigMismatch);
}

TEST_CASE("exponent fits recover known power laws") {
  const std::vector<double> m{1024, 4096, 16384};
  const ExponentFit flat = fit_exponent("stub", m, std::vector<double>{50, 50, 50});
  CHECK(std::abs(flat.exponent) < 0.1);
  const ExponentFit lin = fit_exponent("lin", m, std::vector<double>{1, 4, 16});
  CHECK(lin.exponent == doctest::Approx(1.0));
  CHECK(lin.r2 == doctest::Approx(1.0));
  const ExponentFit quad = fit_exponent("quad", m, std::vector<double>{3, 48, 768});
  CHECK(quad.exponent == doctest::Approx(2.0));
  CHECK(code_of([&] { fit_exponent("few", std::vector<double>{1, 2, 2}, std::vector<double>{1, 2, 3}); }) ==
        ErrorCode::kInsufficientGrid);
}

TEST_CASE("scaling report fits every method and computes speedups") {
  std::vector<TimingStats> t;
  for (std::size_t m : {1000, 2000, 4000}) {
    t.push_back(fake(BenchMethod::kFpsKnn, m, static_cast<double>(m)));
    t.push_back(fake(BenchMethod::kPsnet, m, 100.0));
  }
  const ScalingReport r = scaling_report(t);
  REQUIRE(r.fits.size() == 2);
  CHECK(r.fits[0].method == "fps_knn");
  CHECK(r.fits[0].exponent == doctest::Approx(1.0));
  CHECK(std::abs(r.fits[1].exponent) < 1e-12);
  REQUIRE(r.cells.size() == 6);
  CHECK(*r.cells[1].speedup_vs_fps_knn == doctest::Approx(10.0));
  CHECK(*r.cells[5].speedup_vs_fps_knn == doctest::Approx(40.0));
  const auto doc = nlohmann::json::parse(scaling_report_to_json(r));
  for (const char* key : {"method", "m", "s", "n", "threads", "median_us", "mean_us", "std_us", "speedup_vs_fps_knn"})
    CHECK(doc["timings"][0].contains(key));
  for (const char* key : {"method", "exponent", "r2"}) CHECK(doc["fits"][0].contains(key));

  t.pop_back();
  CHECK(code_of([&] { scaling_report(t); }) == ErrorCode::kInsufficientGrid);
}

TEST_CASE("run_grid measures a small grid") {
  std::vector<BenchConfig> grid;
  for (std::size_t m : {64, 128, 256})
    for (BenchMethod meth : {BenchMethod::kPsnet, BenchMethod::kFpsKnn}) {
      BenchConfig c;
      c.method = meth;
      c.m = m;
      c.s = 8;
      c.n = 4;
      c.repeats = 3;
      grid.push_back(c);
    }
  const auto timings = run_grid(grid);
  CHECK(timings.size() == 6);
  const ScalingReport r = scaling_report(timings);
  CHECK(r.fits.size() == 2);
}

TEST_CASE("kNN groups never count as symmetry errors") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointCloud c = bench_cloud(300, seed);
    const StructuringResult r = baselines::fps_knn_pipeline(c, 20, 8);
    for (double kappa : {1.0, 1.5, 2.0}) {
      const SymmetryErrorReport rep = symmetry_error_rate(r, c, kappa);
      CHECK(rep.error_points == 0);
      CHECK(rep.error_areas == 0);
      CHECK(rep.rate == 0.0);
    }
  }
}

TEST_CASE("a group straddling two distant clusters is flagged") {
  // Two tight clusters of 4 points, 10 cluster diameters apart.
  std::vector<Point3> pts;
  for (int k = 0; k < 4; ++k) pts.push_back({0.01 * k, 0, 0});
  for (int k = 0; k < 4; ++k) pts.push_back({0.3 + 0.01 * k, 0, 0});
  const PointCloud c(pts);
  const std::vector<Index> samples{0, 4};
  const IndexTable groups(2, 4, {0, 1, 5, 6, 4, 5, 6, 7});
  const SymmetryErrorReport rep = symmetry_error_rate(make_result(c, samples, groups), c, 2.0,
                                                      FeatureMode::kCartesian);
  CHECK(rep.error_areas == 1);
  CHECK(rep.error_points == 2);
  CHECK(rep.rate == doctest::Approx(2.0 / 8.0));
  CHECK(rep.mode == FeatureMode::kCartesian);
  const SymmetryErrorReport again = symmetry_error_rate(make_result(c, samples, groups), c, 2.0,
                                                        FeatureMode::kCartesian);
  CHECK(again.error_points == rep.error_points);
  CHECK(again.rate == rep.rate);
  const std::vector<SymmetryErrorReport> both{rep, again};
  const SymmetryErrorReport merged = merge_reports(both);
  CHECK(merged.error_points == 4);
  CHECK(merged.rate == doctest::Approx(4.0 / 16.0));
}

TEST_CASE("ablation driver reports every feature mode") {
  training::ToyTaskConfig cfg;
  cfg.classes = 2;
  cfg.shapes_per_class = 3;
  cfg.test_shapes_per_class = 2;
  cfg.points = 32;
  cfg.samples = 4;
  cfg.group_size = 4;
  cfg.epochs = 1;
  cfg.sftf_hidden = {8};
  cfg.head_widths = {8};
  const std::vector<std::uint64_t> seeds{1, 2};
  const AblationReport rep = ablation_theta_phi(cfg, seeds);
  REQUIRE(rep.arms.size() == 3);
  CHECK(rep.arm(FeatureMode::kSpherical).per_seed.size() == 2);
  CHECK(rep.arm(FeatureMode::kCartesian).per_seed.front().mode == FeatureMode::kCartesian);
  for (const auto& a : rep.arms) {
    CHECK(a.mean_rate >= 0.0);
    CHECK(a.mean_rate <= 1.0);
  }
  const auto doc = nlohmann::json::parse(ablation_to_json(rep));
  CHECK(doc["arms"][0]["feature_mode"] == "xyz_theta_phi");
  CHECK(doc["arms"][0]["d"] == 5);
}

TEST_CASE("bench method names round trip") {
  for (BenchMethod m : {BenchMethod::kFps, BenchMethod::kKnn, BenchMethod::kBallQuery, BenchMethod::kFpsKnn,
                        BenchMethod::kPsnet, BenchMethod::kRandom})
    CHECK(parse_bench_method(bench_method_name(m)) == m);
  CHECK_THROWS_AS(parse_bench_method("gpu"), Error);
}
