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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "psnet/error.hpp"
#include "psnet/synth.hpp"

using namespace psnet;
using namespace psnet::synth;

namespace {

// Solves (A^T A + lambda I) w = A^T y by Gaussian elimination.
std::vector<double> ridge(const std::vector<std::vector<double>>& a, const std::vector<double>& y, double lambda) {
  const std::size_t d = a.front().size();
  std::vector<std::vector<double>> m(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) m[r][c] += a[i][r] * a[i][c];
      m[r][d] += a[i][r] * y[i];
    }
  for (std::size_t r = 0; r < d; ++r) m[r][r] += lambda;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k <= d; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<double> w(d);
  for (std::size_t r = 0; r < d; ++r) w[r] = m[r][d] / m[r][r];
  return w;
}

std::vector<double> naive_features(const PointCloud& c) {
  std::vector<double> f{1.0, 0, 0, 0, 0, 0, 0};
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  for (const auto& p : c.points())
    for (int k = 0; k < 3; ++k) {
      f[1 + k] += p[k] / static_cast<double>(c.size());
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  for (int k = 0; k < 3; ++k) f[4 + k] = hi[k] - lo[k];
  return f;
}

}  // namespace

TEST_CASE("unjittered sphere lies on the unit sphere") {
  SeededRng rng(1);
  for (const auto& p : sample_surface(ShapeFamily::kSphere, 500, rng))
    CHECK(std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0) < 1e-9);
}

TEST_CASE("every family produces finite, bounded points") {
  for (ShapeFamily f : {ShapeFamily::kSphere, ShapeFamily::kBox, ShapeFamily::kCylinder, ShapeFamily::kTorus,
                        ShapeFamily::kCone, ShapeFamily::kEllipsoid, ShapeFamily::kDumbbell, ShapeFamily::kHourglass,
                        ShapeFamily::kSandwich, ShapeFamily::kBicone}) {
    SeededRng rng(2);
    const auto pts = sample_surface(f, 400, rng);
    CHECK(pts.size() == 400);
    for (const auto& p : pts)
      for (double v : p) {
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) < 3.0);
      }
    CHECK_FALSE(family_name(f).empty());
  }
}

TEST_CASE("mirror-symmetric families are balanced about z = 0") {
  for (ShapeFamily f : symmetric_families(4)) {
    CHECK(is_mirror_symmetric(f));
    SeededRng rng(3);
    const auto pts = sample_surface(f, 4000, rng);
    double mean_z = 0, mean_abs = 0;
    std::size_t upper = 0;
    for (const auto& p : pts) {
      mean_z += p[2] / 4000.0;
      mean_abs += std::abs(p[2]) / 4000.0;
      upper += p[2] > 0;
    }
    CHECK(std::abs(mean_z) < 0.05 * mean_abs + 1e-3);
    CHECK(std::abs(static_cast<double>(upper) - 2000.0) < 150.0);
  }
  CHECK_FALSE(is_mirror_symmetric(ShapeFamily::kTorus));
}

TEST_CASE("augmentation with everything disabled is the identity") {
  Augmentation none{0.0, 1.0, 1.0, 0.0, false};
  SeededRng rng(4);
  const std::vector<Point3> pts{{1, 2, 3}, {-1, 0, 0.5}};
  CHECK(augment(pts, none, rng) == pts);
}

TEST_CASE("rotation about z keeps heights and radii") {
  Augmentation rot{0.0, 1.0, 1.0, 0.0, true};
  SeededRng rng(5);
  const std::vector<Point3> pts{{1, 2, 3}, {-1, 0, 0.5}};
  const auto out = augment(pts, rot, rng);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(out[i][2] == pts[i][2]);
    CHECK(std::hypot(out[i][0], out[i][1]) == doctest::Approx(std::hypot(pts[i][0], pts[i][1])));
  }
}

TEST_CASE("datasets are deterministic, labeled and interleaved") {
  DatasetConfig cfg;
  cfg.families = general_families(4);
  cfg.train_per_class = 5;
  cfg.test_per_class = 2;
  cfg.points = 64;
  const Dataset a = make_dataset(cfg, 9), b = make_dataset(cfg, 9), c = make_dataset(cfg, 10);
  REQUIRE(a.train.size() == 20);
  REQUIRE(a.test.size() == 8);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].cloud == b.train[i].cloud);
    CHECK(a.train[i].label == i % 4);
    CHECK(a.train[i].family == cfg.families[i % 4]);
  }
  CHECK_FALSE(a.train[0].cloud == c.train[0].cloud);
  CHECK_THROWS_AS(general_families(7), Error);
  CHECK_THROWS_AS(symmetric_families(1), Error);
}

TEST_CASE("a linear probe on centroid and extent does not solve the task") {
  DatasetConfig cfg;
  cfg.families = general_families(4);
  cfg.train_per_class = 150;
  cfg.test_per_class = 50;
  cfg.points = 256;
  const Dataset ds = make_dataset(cfg, 11);
  std::vector<std::vector<double>> x;
  for (const auto& s : ds.train) x.push_back(naive_features(s.cloud));
  std::vector<std::vector<double>> w;
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> y;
    for (const auto& s : ds.train) y.push_back(s.label == c ? 1.0 : 0.0);
    w.push_back(ridge(x, y, 1e-6));
  }
  std::size_t correct = 0;
  for (const auto& s : ds.test) {
    const auto f = naive_features(s.cloud);
    std::size_t best = 0;
    double best_v = -1e300;
    for (std::size_t c = 0; c < 4; ++c) {
      double v = 0;
      for (std::size_t k = 0; k < f.size(); ++k) v += w[c][k] * f[k];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    correct += best == s.label;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(ds.test.size());
  MESSAGE("naive linear probe accuracy " << acc);
  CHECK(acc < 1.0);
}
