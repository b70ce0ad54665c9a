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

#include "psnet/core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace psnet {

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::kEmptyCloud, "point cloud has no points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
      throw NonFiniteCoordinate(i);
  }
  xs_.resize(points_.size());
  ys_.resize(points_.size());
  zs_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    xs_[i] = points_[i][0];
    ys_[i] = points_[i][1];
    zs_[i] = points_[i][2];
  }
}

PointCloud validate_cloud(std::vector<Point3> raw) { return PointCloud(std::move(raw)); }

IndexTable::IndexTable(std::size_t rows, std::size_t cols, std::vector<Index> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorCode::kShapeMismatch, "index table data does not match its shape");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorCode::kShapeMismatch,
                "matrix data has " + std::to_string(data_.size()) + " entries, shape needs " +
                    std::to_string(rows_ * cols_));
}

bool DenseMatrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

DenseMatrix coordinates(const PointCloud& cloud) {
  DenseMatrix out(cloud.size(), 3);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k) out(i, k) = cloud[i][k];
  return out;
}

PointCloud gather_points(const PointCloud& cloud, std::span<const Index> indices) {
  std::vector<Point3> pts;
  pts.reserve(indices.size());
  for (Index i : indices) {
    if (i >= cloud.size()) throw Error(ErrorCode::kInvalidArgument, "point index out of range");
    pts.push_back(cloud[i]);
  }
  return PointCloud(std::move(pts));
}

}  // namespace psnet
