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

#include "psnet/structuring.hpp"

#include <string>
#include <utility>

namespace psnet {

StructuringResult make_result(const PointCloud& cloud, std::vector<Index> samples, IndexTable groups) {
  StructuringResult r;
  r.sampled_xyz = DenseMatrix(samples.size(), 3);
  for (std::size_t j = 0; j < samples.size(); ++j)
    for (std::size_t k = 0; k < 3; ++k) r.sampled_xyz(j, k) = cloud[samples[j]][k];
  r.grouped_xyz = Tensor3(groups.rows(), groups.cols(), 3);
  for (std::size_t j = 0; j < groups.rows(); ++j)
    for (std::size_t t = 0; t < groups.cols(); ++t)
      for (std::size_t k = 0; k < 3; ++k) r.grouped_xyz(j, t, k) = cloud[groups(j, t)][k];
  r.sample_indices = std::move(samples);
  r.groups = std::move(groups);
  return r;
}

Tensor3 gather_groups(const DenseMatrix& features, const IndexTable& groups) {
  Tensor3 out(groups.rows(), groups.cols(), features.cols());
  for (std::size_t j = 0; j < groups.rows(); ++j)
    for (std::size_t t = 0; t < groups.cols(); ++t) {
      const auto src = features.row(groups(j, t));
      for (std::size_t k = 0; k < features.cols(); ++k) out(j, t, k) = src[k];
    }
  return out;
}

SampleAndGroup package_sample_and_group(const PointCloud& cloud, const StructuringResult& result,
                                        const std::optional<DenseMatrix>& extra_features) {
  if (extra_features && extra_features->rows() != cloud.size())
    throw Error(ErrorCode::kShapeMismatch, "extra features have " + std::to_string(extra_features->rows()) +
                                               " rows, cloud has " + std::to_string(cloud.size()) + " points");
  SampleAndGroup out{result.sampled_xyz, result.grouped_xyz, std::nullopt};
  if (extra_features) out.grouped_features = gather_groups(*extra_features, result.groups);
  return out;
}

}  // namespace psnet
