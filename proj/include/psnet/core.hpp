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

#ifndef PSNET_CORE_HPP_
#define PSNET_CORE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "psnet/error.hpp"

namespace psnet {

using Index = std::uint32_t;
using Point3 = std::array<double, 3>;

/// Squared Euclidean distance. All distance comparisons in the library are
/// made on this quantity, evaluated in exactly this order.
inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// An ordered, non-empty set of points with finite coordinates.
/// Immutable after construction.
class PointCloud {
 public:
  /// Throws EmptyCloud / NonFiniteCoordinate.
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point3> points() const noexcept { return points_; }

  /// Coordinates in structure-of-arrays layout, for the vectorised kernels.
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::span<const double> zs() const noexcept { return zs_; }

  bool operator==(const PointCloud& other) const { return points_ == other.points_; }

 private:
  std::vector<Point3> points_;
  std::vector<double> xs_, ys_, zs_;
};

/// Named entry point for validation of raw input.
PointCloud validate_cloud(std::vector<Point3> raw);

/// Row-major rows x cols table of point indices. Rows hold distinct indices.
class IndexTable {
 public:
  IndexTable() = default;
  IndexTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  IndexTable(std::size_t rows, std::size_t cols, std::vector<Index> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const Index> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<Index> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  Index operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Index& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const Index> data() const noexcept { return data_; }

  bool operator==(const IndexTable&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Index> data_;
};

/// Dense row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool all_finite() const;
  DenseMatrix transposed() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// m x 3 matrix of the cloud's coordinates.
DenseMatrix coordinates(const PointCloud& cloud);

/// Gathers the listed points into a new cloud (used for permutations/subsets).
PointCloud gather_points(const PointCloud& cloud, std::span<const Index> indices);

}  // namespace psnet

#endif  // PSNET_CORE_HPP_
