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
#include <limits>
#include <numeric>
#include <set>

#include "doctest.h"
#include "psnet/baselines.hpp"
#include "psnet/error.hpp"

using namespace psnet;
using namespace psnet::baselines;

namespace {

PointCloud random_cloud(std::size_t m, std::uint64_t seed, bool lattice = false) {
  SeededRng rng(seed);
  std::vector<Point3> pts(m);
  for (auto& p : pts) {
    if (lattice) {
      p = {static_cast<double>(rng.below(4)), static_cast<double>(rng.below(4)), static_cast<double>(rng.below(3))};
    } else {
      p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
  }
  return PointCloud(pts);
}

// Recomputes every minimum distance from scratch at each step.
std::vector<Index> fps_oracle(const PointCloud& c, std::size_t s, Index start) {
  std::vector<Index> chosen{start};
  while (chosen.size() < s) {
    double best = -1;
    Index arg = 0;
    for (Index i = 0; i < c.size(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      double dmin = std::numeric_limits<double>::infinity();
      for (Index j : chosen) dmin = std::min(dmin, squared_distance(c[i], c[j]));
      if (dmin > best) {
        best = dmin;
        arg = i;
      }
    }
    chosen.push_back(arg);
  }
  return chosen;
}

std::vector<Index> knn_oracle(const PointCloud& c, Index center, std::size_t n) {
  std::vector<Index> all(c.size());
  std::iota(all.begin(), all.end(), Index{0});
  std::stable_sort(all.begin(), all.end(), [&](Index a, Index b) {
    return squared_distance(c[a], c[center]) < squared_distance(c[b], c[center]);
  });
  all.resize(n);
  return all;
}

std::vector<Index> ball_oracle(const PointCloud& c, Index center, double radius, std::size_t n) {
  std::vector<Index> in;
  for (Index i = 0; i < c.size() && in.size() < n; ++i)
    if (squared_distance(c[i], c[center]) <= radius * radius) in.push_back(i);
  while (in.size() < n) in.push_back(in.front());
  return in;
}

}  // namespace

TEST_CASE("fps matches a from-scratch oracle and satisfies the greedy certificate") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const bool lattice = seed % 2 == 1;   // lattice clouds exercise ties
    const PointCloud c = random_cloud(8 + seed * 12, seed, lattice);
    const std::size_t s = std::min<std::size_t>(c.size(), 16);
    const auto got = fps(c, s);
    CHECK(got == fps_oracle(c, s, 0));
    for (std::size_t k = 1; k < got.size(); ++k) {
      auto min_to_prefix = [&](Index i) {
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < k; ++t) d = std::min(d, squared_distance(c[i], c[got[t]]));
        return d;
      };
      const double chosen = min_to_prefix(got[k]);
      for (Index i = 0; i < c.size(); ++i) {
        if (std::find(got.begin(), got.begin() + static_cast<std::ptrdiff_t>(k), i) != got.begin() + static_cast<std::ptrdiff_t>(k))
          continue;
        CHECK(min_to_prefix(i) <= chosen);
        if (min_to_prefix(i) == chosen) CHECK(i >= got[k]);
      }
    }
  }
}

TEST_CASE("fps on a square picks the opposite corner") {
  const PointCloud c({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  const auto got = fps(c, 4);
  CHECK(got == std::vector<Index>{0, 3, 1, 2});
  CHECK(fps(c, 2, 1) == std::vector<Index>{1, 2});
}

TEST_CASE("fps examples") {
  std::vector<Point3> line;
  for (int i = 0; i < 10; ++i) line.push_back({static_cast<double>(i), 0, 0});
  CHECK(fps(PointCloud(line), 2) == std::vector<Index>{0, 9});

  const PointCloud sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}});
  const auto corners = fps(sq, 4);
  CHECK(corners == fps_oracle(sq, 4, 0));
  CHECK(std::set<Index>(corners.begin(), corners.end()) == std::set<Index>{0, 1, 2, 3});

  const PointCloud c = random_cloud(37, 4);
  const auto all = fps(c, 37, 5);
  CHECK(all.front() == 5);
  CHECK(std::set<Index>(all.begin(), all.end()).size() == 37);
}

TEST_CASE("fps sample sets depend on the start index") {
  const PointCloud c = random_cloud(64, 21);
  bool differs = false;
  const auto ref = fps(c, 8, 0);
  const std::set<Index> ref_set(ref.begin(), ref.end());
  for (Index start = 1; start < 64 && !differs; ++start) {
    const auto other = fps(c, 8, start);
    differs = std::set<Index>(other.begin(), other.end()) != ref_set;
  }
  CHECK(differs);
}

TEST_CASE("fps rejects oversize requests") {
  const PointCloud c({{0, 0, 0}, {1, 0, 0}});
  try {
    fps(c, 3);
    FAIL("expected SampleCountTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSampleCountTooLarge);
  }
  CHECK_THROWS_AS(fps(c, 1, 5), Error);
}

TEST_CASE("knn_group equals brute force on random instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PointCloud c = random_cloud(40 + seed, 100 + seed, seed % 3 == 0);
    const auto centers = fps(c, 5);
    const std::size_t n = 1 + seed % 9;
    for (int threads : {1, 3}) {
      const IndexTable t = knn_group(c, centers, n, threads);
      for (std::size_t j = 0; j < centers.size(); ++j) {
        const auto want = knn_oracle(c, centers[j], n);
        CHECK(std::vector<Index>(t.row(j).begin(), t.row(j).end()) == want);
      }
    }
  }
}

TEST_CASE("knn_group includes the centre and rejects n > m") {
  const PointCloud c = random_cloud(10, 3);
  const std::vector<Index> centers{4};
  CHECK(knn_group(c, centers, 1)(0, 0) == 4);
  try {
    knn_group(c, centers, 11);
    FAIL("expected GroupSizeTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGroupSizeTooLarge);
  }
}

TEST_CASE("ball_query equals brute force on random instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const PointCloud c = random_cloud(60, 200 + seed, seed % 4 == 0);
    const auto centers = fps(c, 6);
    const double radius = 0.2 + 0.05 * static_cast<double>(seed % 10);
    const std::size_t n = 2 + seed % 7;
    const IndexTable t = ball_query(c, centers, {radius, n}, 1 + static_cast<int>(seed % 3));
    for (std::size_t j = 0; j < centers.size(); ++j)
      CHECK(std::vector<Index>(t.row(j).begin(), t.row(j).end()) == ball_oracle(c, centers[j], radius, n));
  }
}

TEST_CASE("ball_query pads with the first qualifying index") {
  const PointCloud c({{5, 5, 5}, {0, 0, 0}, {0.1, 0, 0}, {9, 9, 9}});
  const std::vector<Index> centers{2};
  const IndexTable t = ball_query(c, centers, {0.5, 4});
  CHECK(std::vector<Index>(t.row(0).begin(), t.row(0).end()) == std::vector<Index>{1, 2, 1, 1});
  CHECK_THROWS_AS(ball_query(c, centers, {0.0, 2}), Error);
}

TEST_CASE("random_sample draws distinct indices deterministically") {
  const PointCloud c = random_cloud(50, 1);
  SeededRng a(3), b(3);
  const auto x = random_sample(c, 20, a);
  CHECK(x == random_sample(c, 20, b));
  CHECK(std::set<Index>(x.begin(), x.end()).size() == 20);
  for (Index i : x) CHECK(i < 50);
  SeededRng r(4);
  CHECK_THROWS_AS(random_sample(c, 51, r), Error);
}

TEST_CASE("random_sample is uniform over positions") {
  const PointCloud c = random_cloud(10, 2);
  std::vector<int> hits(10, 0);
  SeededRng r(8);
  for (int t = 0; t < 20000; ++t)
    for (Index i : random_sample(c, 3, r)) ++hits[i];
  for (int h : hits) CHECK(std::abs(h - 6000) < 400);
}

TEST_CASE("pipelines package consistent results") {
  const PointCloud c = random_cloud(100, 5);
  const StructuringResult r = fps_knn_pipeline(c, 8, 4);
  CHECK(r.sample_indices == fps(c, 8));
  CHECK(r.groups == knn_group(c, r.sample_indices, 4));
  CHECK(r.sampled_xyz.rows() == 8);
  CHECK(r.grouped_xyz.dim0 == 8);
  CHECK(r.grouped_xyz.dim1 == 4);
  for (std::size_t j = 0; j < 8; ++j)
    for (int k = 0; k < 3; ++k) {
      CHECK(r.sampled_xyz(j, k) == c[r.sample_indices[j]][k]);
      CHECK(r.grouped_xyz(j, 2, k) == c[r.groups(j, 2)][k]);
    }
  const SampleAndGroup sg = fps_ball_query_sample_and_group(c, 8, {0.5, 4}, coordinates(c));
  REQUIRE(sg.grouped_features.has_value());
  CHECK(sg.grouped_features->dim2 == 3);
  CHECK(sg.grouped_features->data == sg.grouped_xyz.data);
  CHECK_THROWS_AS(fps_knn_sample_and_group(c, 8, 4, DenseMatrix(99, 2)), Error);
}
