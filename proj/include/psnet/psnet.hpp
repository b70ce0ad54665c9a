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

#ifndef PSNET_PSNET_HPP_
#define PSNET_PSNET_HPP_

#include <optional>
#include <span>
#include <vector>

#include "psnet/core.hpp"
#include "psnet/features.hpp"
#include "psnet/rng.hpp"
#include "psnet/structuring.hpp"

// Learned single-pass structuring. A shared pointwise MLP maps every point's
// spatial features to s correlation scores (one per local area); a sigmoid
// turns them into membership probabilities; column j's top-n points form
// local area j and its top-1 point is the area's sampling point.
namespace psnet {

enum class Activation { kRelu, kTanh };

struct DenseLayer {
  DenseMatrix weight;         // out x in
  std::vector<double> bias;   // out

  std::size_t in() const { return weight.cols(); }
  std::size_t out() const { return weight.rows(); }
  bool operator==(const DenseLayer&) const = default;
};

/// Weights of the pointwise transform. channels = {d, h1, ..., s}; the hidden
/// activation is applied after every layer except the last.
class SftfParams {
 public:
  SftfParams() = default;
  /// Throws ShapeMismatch / InvalidArgument on inconsistent layers or
  /// non-finite weights.
  SftfParams(std::vector<DenseLayer> layers, Activation activation = Activation::kRelu);

  /// All-zero weights and biases with the given widths.
  static SftfParams zeros(std::span<const std::size_t> channels, Activation activation = Activation::kRelu);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static SftfParams random(std::span<const std::size_t> channels, SeededRng& rng,
                           Activation activation = Activation::kRelu);

  std::vector<std::size_t> channels() const;
  std::size_t input_width() const { return layers_.front().in(); }
  std::size_t num_areas() const { return layers_.back().out(); }
  std::size_t num_parameters() const;
  Activation activation() const { return activation_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  bool operator==(const SftfParams&) const = default;

 private:
  std::vector<DenseLayer> layers_;
  Activation activation_ = Activation::kRelu;
};

/// Channel list {d, 32, 128, s}.
std::vector<std::size_t> default_channels(std::size_t d, std::size_t s);

/// m x s matrix of membership probabilities, every entry in the open (0, 1).
class MembershipMatrix {
 public:
  /// Throws InvalidArgument if an entry falls outside (0, 1).
  explicit MembershipMatrix(DenseMatrix values);

  std::size_t num_points() const { return values_.rows(); }
  std::size_t num_areas() const { return values_.cols(); }
  double operator()(std::size_t point, std::size_t area) const { return values_(point, area); }
  const DenseMatrix& values() const { return values_; }

 private:
  DenseMatrix values_;
};

/// Logistic sigmoid clamped into the open unit interval, so that saturated
/// inputs (|x| > ~37 for the upper side) still give valid probabilities
/// with a finite logarithm.
double membership_sigmoid(double x);

/// Correlation matrix T(P): row i is the MLP applied to feature row i.
DenseMatrix sftf_forward(const DenseMatrix& features, const SftfParams& params, int threads = 1);

MembershipMatrix membership(const DenseMatrix& correlations);

/// Row j lists the n points with the largest membership in area j,
/// largest first, ties to the lowest point index.
IndexTable group_indices(const MembershipMatrix& q, std::size_t n, int threads = 1);

/// Index of the largest membership per area (ties to the lowest index).
std::vector<Index> sample_indices(const MembershipMatrix& q);

struct StructureOptions {
  FeatureMode features = FeatureMode::kSpherical;
  int threads = 1;
};

/// Single-pass sampling + grouping. Fuses the MLP with the per-area top-n
/// selection so the m x s matrix is never materialised; the output equals
/// the unfused composition of the operations above.
StructuringResult structure(const PointCloud& cloud, const SftfParams& params, std::size_t n,
                            const StructureOptions& options = {});

/// Drop-in replacement for the conventional FPS + grouping call.
SampleAndGroup sample_and_group(const PointCloud& cloud, const SftfParams& params, std::size_t n,
                                const std::optional<DenseMatrix>& extra_features = std::nullopt,
                                const StructureOptions& options = {});

}  // namespace psnet

#endif  // PSNET_PSNET_HPP_
