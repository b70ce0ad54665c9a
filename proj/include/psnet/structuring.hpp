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

#ifndef PSNET_STRUCTURING_HPP_
#define PSNET_STRUCTURING_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "psnet/core.hpp"

namespace psnet {

/// Dense rows x cols x channels block, row-major (used for grouped outputs:
/// s local areas x n members x channels).
struct Tensor3 {
  std::size_t dim0 = 0;
  std::size_t dim1 = 0;
  std::size_t dim2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t d0, std::size_t d1, std::size_t d2) : dim0(d0), dim1(d1), dim2(d2), data(d0 * d1 * d2, 0.0) {}

  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data[(i * dim1 + j) * dim2 + k]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data[(i * dim1 + j) * dim2 + k]; }

  bool operator==(const Tensor3&) const = default;
};

/// Output of one data-structuring pass: s sampling points and their groups.
struct StructuringResult {
  std::vector<Index> sample_indices;  // s
  IndexTable groups;                  // s x n
  DenseMatrix sampled_xyz;            // s x 3
  Tensor3 grouped_xyz;                // s x n x 3

  std::size_t num_samples() const { return sample_indices.size(); }
  std::size_t group_size() const { return groups.cols(); }
  bool operator==(const StructuringResult&) const = default;
};

/// Packages indices and gathers their coordinates.
StructuringResult make_result(const PointCloud& cloud, std::vector<Index> samples, IndexTable groups);

/// The drop-in triple returned by every sample-and-group pipeline.
struct SampleAndGroup {
  DenseMatrix sampled_xyz;                   // s x 3
  Tensor3 grouped_xyz;                       // s x n x 3
  std::optional<Tensor3> grouped_features;   // s x n x c
};

/// Gathers rows of `features` (m x c) by the group table.
Tensor3 gather_groups(const DenseMatrix& features, const IndexTable& groups);

SampleAndGroup package_sample_and_group(const PointCloud& cloud, const StructuringResult& result,
                                        const std::optional<DenseMatrix>& extra_features);

}  // namespace psnet

#endif  // PSNET_STRUCTURING_HPP_
