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

#include "psnet/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "psnet/parallel.hpp"
#include "psnet/topk.hpp"

namespace psnet::baselines {
namespace {

void check_sample_count(const PointCloud& cloud, std::size_t s) {
  if (s > cloud.size())
    throw Error(ErrorCode::kSampleCountTooLarge,
                "cannot sample " + std::to_string(s) + " of " + std::to_string(cloud.size()) + " points");
}

void check_centers(const PointCloud& cloud, std::span<const Index> centers) {
  for (Index c : centers)
    if (c >= cloud.size()) throw Error(ErrorCode::kInvalidArgument, "center index " + std::to_string(c) + " out of range");
}

}  // namespace

std::vector<Index> fps(const PointCloud& cloud, std::size_t s, Index start_index) {
  check_sample_count(cloud, s);
  const std::size_t m = cloud.size();
  if (start_index >= m) throw Error(ErrorCode::kInvalidArgument, "start index out of range");
  std::vector<Index> picked;
  picked.reserve(s);
  if (s == 0) return picked;

  const double* xs = cloud.xs().data();
  const double* ys = cloud.ys().data();
  const double* zs = cloud.zs().data();
  // Selected points hold -1 so they can never win the argmax again.
  std::vector<double> min_d(m, std::numeric_limits<double>::infinity());
  double* md = min_d.data();

  Index last = start_index;
  picked.push_back(last);
  md[last] = -1.0;
  for (std::size_t k = 1; k < s; ++k) {
    const double lx = xs[last], ly = ys[last], lz = zs[last];
    double best = -2.0;
#pragma omp simd reduction(max : best)
    for (std::size_t i = 0; i < m; ++i) {
      const double dx = xs[i] - lx;
      const double dy = ys[i] - ly;
      const double dz = zs[i] - lz;
      const double d = dx * dx + dy * dy + dz * dz;
      const double v = d < md[i] ? d : md[i];
      md[i] = v;
      best = v > best ? v : best;
    }
    Index arg = 0;
    while (md[arg] != best) ++arg;
    last = arg;
    picked.push_back(last);
    md[last] = -1.0;
  }
  return picked;
}

IndexTable knn_group(const PointCloud& cloud, std::span<const Index> centers, std::size_t n, int threads) {
  const std::size_t m = cloud.size();
  if (n > m)
    throw Error(ErrorCode::kGroupSizeTooLarge,
                "group size " + std::to_string(n) + " exceeds " + std::to_string(m) + " points");
  check_centers(cloud, centers);
  IndexTable out(centers.size(), n);
  const double* xs = cloud.xs().data();
  const double* ys = cloud.ys().data();
  const double* zs = cloud.zs().data();
  parallel_chunks(centers.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> dist(m);
    for (std::size_t j = begin; j < end; ++j) {
      const Point3& c = cloud[centers[j]];
      for (std::size_t i = 0; i < m; ++i) {
        const double dx = xs[i] - c[0];
        const double dy = ys[i] - c[1];
        const double dz = zs[i] - c[2];
        dist[i] = dx * dx + dy * dy + dz * dz;
      }
      TopSelector sel(n);
      for (std::size_t i = 0; i < n; ++i) sel.offer(dist[i], static_cast<Index>(i));
      double thr = sel.threshold();
      constexpr std::size_t kStride = 64;
      for (std::size_t i0 = n; i0 < m; i0 += kStride) {
        const std::size_t i1 = std::min(m, i0 + kStride);
        bool any = false;
        for (std::size_t i = i0; i < i1; ++i) any |= dist[i] < thr;
        if (!any) continue;
        for (std::size_t i = i0; i < i1; ++i) {
          if (dist[i] < thr) {
            sel.offer(dist[i], static_cast<Index>(i));
            thr = sel.threshold();
          }
        }
      }
      auto row = out.row(j);
      const auto sorted = sel.take_sorted();
      for (std::size_t t = 0; t < n; ++t) row[t] = sorted[t].index;
    }
  });
  return out;
}

IndexTable ball_query(const PointCloud& cloud, std::span<const Index> centers, const BallQueryConfig& cfg,
                      int threads) {
  if (!(cfg.radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ball query radius must be positive");
  if (cfg.n == 0) throw Error(ErrorCode::kInvalidArgument, "ball query group size must be at least 1");
  check_centers(cloud, centers);
  const std::size_t m = cloud.size();
  const double r2 = cfg.radius * cfg.radius;
  IndexTable out(centers.size(), cfg.n);
  parallel_chunks(centers.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Point3& c = cloud[centers[j]];
      auto row = out.row(j);
      std::size_t found = 0;
      for (std::size_t i = 0; i < m && found < cfg.n; ++i)
        if (squared_distance(cloud[i], c) <= r2) row[found++] = static_cast<Index>(i);
      // The center always qualifies, so found >= 1 here.
      for (std::size_t t = found; t < cfg.n; ++t) row[t] = row[0];
    }
  });
  return out;
}

std::vector<Index> random_sample(const PointCloud& cloud, std::size_t s, SeededRng& rng) {
  check_sample_count(cloud, s);
  std::vector<Index> perm(cloud.size());
  std::iota(perm.begin(), perm.end(), Index{0});
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(perm.size() - k));
    std::swap(perm[k], perm[pick]);
  }
  perm.resize(s);
  return perm;
}

StructuringResult fps_knn_pipeline(const PointCloud& cloud, std::size_t s, std::size_t n, Index start_index,
                                   int threads) {
  if (n > cloud.size())
    throw Error(ErrorCode::kGroupSizeTooLarge, "group size exceeds point count");
  auto samples = fps(cloud, s, start_index);
  auto groups = knn_group(cloud, samples, n, threads);
  return make_result(cloud, std::move(samples), std::move(groups));
}

StructuringResult fps_ball_query_pipeline(const PointCloud& cloud, std::size_t s, const BallQueryConfig& cfg,
                                          Index start_index, int threads) {
  auto samples = fps(cloud, s, start_index);
  auto groups = ball_query(cloud, samples, cfg, threads);
  return make_result(cloud, std::move(samples), std::move(groups));
}

SampleAndGroup fps_ball_query_sample_and_group(const PointCloud& cloud, std::size_t s, const BallQueryConfig& cfg,
                                               const std::optional<DenseMatrix>& extra_features,
                                               Index start_index) {
  return package_sample_and_group(cloud, fps_ball_query_pipeline(cloud, s, cfg, start_index), extra_features);
}

SampleAndGroup fps_knn_sample_and_group(const PointCloud& cloud, std::size_t s, std::size_t n,
                                        const std::optional<DenseMatrix>& extra_features, Index start_index) {
  return package_sample_and_group(cloud, fps_knn_pipeline(cloud, s, n, start_index), extra_features);
}

}  // namespace psnet::baselines
