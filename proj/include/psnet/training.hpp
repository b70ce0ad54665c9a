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

#ifndef PSNET_TRAINING_HPP_
#define PSNET_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psnet/baselines.hpp"
#include "psnet/core.hpp"
#include "psnet/features.hpp"
#include "psnet/psnet.hpp"
#include "psnet/rng.hpp"
#include "psnet/synth.hpp"

namespace psnet::training {

// ---------------------------------------------------------------------------
// Differentiable indexing

enum class TemperatureDecay { kConstant, kLinear, kExponential };

struct GumbelConfig {
  double temperature = 1.0;   // used by gumbel_softmax_columns
  bool noise_enabled = true;
  double initial_temperature = 1.0;
  double final_temperature = 0.1;
  TemperatureDecay decay = TemperatureDecay::kExponential;

  /// Annealed temperature for `epoch` of `epochs` (initial at epoch 0, final
  /// at the last epoch).
  double temperature_at(std::size_t epoch, std::size_t epochs) const;
};

/// -ln(-ln(u)) for u in (0, 1).
double gumbel_transform(double u);

/// rows x cols standard Gumbel draws.
DenseMatrix gumbel_noise(std::size_t rows, std::size_t cols, SeededRng& rng);

/// m x s matrix whose columns are probability vectors.
class SoftSampleMatrix {
 public:
  /// Throws InvalidArgument unless entries are in [0, 1] and every column
  /// sums to 1 within 1e-9.
  explicit SoftSampleMatrix(DenseMatrix values);
  const DenseMatrix& values() const { return values_; }
  std::size_t num_points() const { return values_.rows(); }
  std::size_t num_areas() const { return values_.cols(); }

 private:
  DenseMatrix values_;
};

/// Column j: softmax((ln q_j + g_j) / temperature), g_j standard Gumbel or 0.
SoftSampleMatrix gumbel_softmax_columns(const MembershipMatrix& q, const GumbelConfig& cfg, SeededRng& rng);

/// Convex combinations of the points: s x 3 = soft^T * P.
DenseMatrix soft_sample(const SoftSampleMatrix& soft, const PointCloud& cloud);

/// -ln p[label]; p[label] below 1e-12 is clamped and counted.
double cross_entropy(std::span<const double> probs, std::size_t label, std::size_t* clamped = nullptr);

// ---------------------------------------------------------------------------
// Toy classifier head

/// Pointwise MLP over recentred group members (3 -> widths...), max over each
/// group, mean over groups, then a linear layer to class logits.
struct HeadParams {
  std::vector<DenseLayer> pointwise;
  DenseLayer classifier;

  static HeadParams zeros(std::span<const std::size_t> widths, std::size_t classes);
  static HeadParams random(std::span<const std::size_t> widths, std::size_t classes, SeededRng& rng);
  std::size_t num_classes() const { return classifier.out(); }
  bool operator==(const HeadParams&) const = default;
};

/// Members minus their area's centre: out(j, t, :) = grouped(j, t, :) - centers(j, :).
Tensor3 recenter(const Tensor3& grouped_xyz, const DenseMatrix& centers);

/// Class probabilities (softmax of the logits) for one shape.
std::vector<double> toy_head_forward(const Tensor3& recentered, const HeadParams& head);

// ---------------------------------------------------------------------------
// Co-training

enum class Method {
  kPsnet,                    // learned sampling and grouping
  kFpsKnn,                   // farthest point sampling + kNN
  kRandomKnn,                // random sampling + kNN
  kPsnetSamplingBallQuery,   // learned sampling + ball query grouping
};

std::string_view method_name(Method method);
Method parse_method(std::string_view name);
bool method_uses_sftf(Method method);

struct ToyTaskConfig {
  std::size_t classes = 4;
  std::size_t shapes_per_class = 100;       // training shapes
  std::size_t test_shapes_per_class = 50;
  std::size_t points = 256;                 // m
  std::size_t samples = 16;                 // s
  std::size_t group_size = 16;              // n
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 7;
  Method method = Method::kPsnet;
  FeatureMode features = FeatureMode::kSpherical;
  std::vector<std::size_t> sftf_hidden = {32, 128};
  std::vector<std::size_t> head_widths = {32, 64};
  GumbelConfig gumbel;
  double ball_radius = 0.35;
  bool symmetric_shapes = false;
  synth::Augmentation augmentation;
};

/// Labeled synthetic shapes for the task (families picked by
/// cfg.symmetric_shapes).
synth::Dataset synth_dataset(const ToyTaskConfig& cfg);

struct ToyModel {
  SftfParams sftf;
  HeadParams head;

  /// Flat views of every trainable tensor, SFTF first, in a fixed order.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::size_t num_parameters() const;
  bool operator==(const ToyModel&) const = default;
};

ToyModel init_model(const ToyTaskConfig& cfg, SeededRng& rng);

/// Controls one differentiable forward pass.
struct ForwardOptions {
  double temperature = 1.0;
  /// m x s Gumbel noise, or empty for the noiseless relaxation.
  const DenseMatrix* noise = nullptr;
  /// Grouping to use instead of recomputing it from the current parameters.
  const IndexTable* frozen_groups = nullptr;
  /// Also return d loss / d point coordinates.
  bool point_gradient = false;
  /// Source of randomness for Method::kRandomKnn.
  SeededRng* rng = nullptr;
  /// Replays the tape after the pass and reports the outcome in
  /// ForwardResult::tape_replay_ok.
  bool verify_replay = false;
};

struct ForwardResult {
  double loss = 0.0;
  std::vector<double> probabilities;
  /// One flat gradient per entry of ToyModel::parameters().
  std::vector<std::vector<double>> gradients;
  /// False for tensors the loss does not depend on (their gradient is 0).
  std::vector<bool> connected;
  DenseMatrix point_gradient;   // m x 3 when requested
  std::vector<Index> sample_indices;
  IndexTable groups;
  bool tape_replay_ok = true;
  std::size_t clamped_probabilities = 0;
};

/// Records the training-time forward pass on a tape and runs backward.
/// Sampling points are the Gumbel-softmax soft samples; group membership is
/// a hard top-n selection that carries no gradient.
ForwardResult loss_and_gradient(const ToyModel& model, const synth::LabeledCloud& shape, const ToyTaskConfig& cfg,
                                const ForwardOptions& options);

/// Inference path: hard structuring, then the head. `rng` is only used by
/// Method::kRandomKnn.
std::vector<double> predict(const ToyModel& model, const PointCloud& cloud, const ToyTaskConfig& cfg,
                            SeededRng& rng);

/// Hard structuring used by predict() (exposed for the symmetry report).
StructuringResult structure_for(const ToyModel& model, const PointCloud& cloud, const ToyTaskConfig& cfg,
                                SeededRng& rng);

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double temperature = 0.0;
  double sample_drift = 0.0;
};

struct TrainResult {
  ToyModel model;
  std::vector<EpochMetrics> history;
  std::size_t clamped_probabilities = 0;
  double final_test_acc() const { return history.empty() ? 0.0 : history.back().test_acc; }
};

/// Mini-batch SGD with momentum. Throws NonFiniteLoss (with epoch, batch and
/// shape in the message) if a loss is NaN or infinite.
TrainResult train(const ToyTaskConfig& cfg);
TrainResult train(const ToyTaskConfig& cfg, const synth::Dataset& data);

double accuracy(const ToyModel& model, std::span<const synth::LabeledCloud> shapes, const ToyTaskConfig& cfg,
                std::uint64_t seed);

/// JSON array of {epoch, loss, train_acc, test_acc, temperature, sample_drift}.
std::string metrics_to_json(std::span<const EpochMetrics> history);

}  // namespace psnet::training

#endif  // PSNET_TRAINING_HPP_
