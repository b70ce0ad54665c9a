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

#ifndef PSNET_BASELINES_HPP_
#define PSNET_BASELINES_HPP_

#include <optional>
#include <span>
#include <vector>

#include "psnet/core.hpp"
#include "psnet/rng.hpp"
#include "psnet/structuring.hpp"

// Classical two-stage structuring: subsample first, then group around the
// samples by distance. Everything here is brute force over the whole cloud.
namespace psnet::baselines {

struct BallQueryConfig {
  double radius;
  std::size_t n;
};

/// Farthest point sampling with cached minimum distances, O(m s).
/// The first index is `start_index`; each later pick maximises the squared
/// distance to the already selected set, ties to the lowest index.
std::vector<Index> fps(const PointCloud& cloud, std::size_t s, Index start_index = 0);

/// Row j: the n points nearest to centers[j], nearest first, ties to the
/// lowest index.
IndexTable knn_group(const PointCloud& cloud, std::span<const Index> centers, std::size_t n, int threads = 1);

/// Row j: up to n points with squared distance <= radius^2 from centers[j],
/// in index order, padded with the first qualifying index.
IndexTable ball_query(const PointCloud& cloud, std::span<const Index> centers, const BallQueryConfig& cfg,
                      int threads = 1);

/// s distinct indices, uniform without replacement (partial Fisher-Yates).
std::vector<Index> random_sample(const PointCloud& cloud, std::size_t s, SeededRng& rng);

StructuringResult fps_knn_pipeline(const PointCloud& cloud, std::size_t s, std::size_t n, Index start_index = 0,
                                   int threads = 1);

StructuringResult fps_ball_query_pipeline(const PointCloud& cloud, std::size_t s, const BallQueryConfig& cfg,
                                          Index start_index = 0, int threads = 1);

/// Drop-in signature shared with psnet::sample_and_group.
SampleAndGroup fps_ball_query_sample_and_group(const PointCloud& cloud, std::size_t s, const BallQueryConfig& cfg,
                                               const std::optional<DenseMatrix>& extra_features = std::nullopt,
                                               Index start_index = 0);

SampleAndGroup fps_knn_sample_and_group(const PointCloud& cloud, std::size_t s, std::size_t n,
                                        const std::optional<DenseMatrix>& extra_features = std::nullopt,
                                        Index start_index = 0);

}  // namespace psnet::baselines

#endif  // PSNET_BASELINES_HPP_
