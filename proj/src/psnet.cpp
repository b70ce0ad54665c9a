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

#include "psnet/psnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "psnet/parallel.hpp"
#include "psnet/topk.hpp"

namespace psnet {
namespace {

constexpr std::size_t kBlock = 64;
constexpr double kMembershipLow = std::numeric_limits<double>::min();
constexpr double kMembershipHigh = 1.0 - 0x1.0p-53;

/// Scratch for one block of points, activations stored channel-major
/// ([channel][point]) so the inner loops run over contiguous points.
class BlockForward {
 public:
  explicit BlockForward(const SftfParams& params) : params_(params) {
    std::size_t widest = params.input_width();
    for (const auto& layer : params.layers()) widest = std::max(widest, layer.out());
    a_.assign(widest * kBlock, 0.0);
    b_.assign(widest * kBlock, 0.0);
  }

  /// Runs rows [begin, begin + count) of `features` and returns the last
  /// layer's output, channel-major with stride kBlock.
  const double* run(const DenseMatrix& features, std::size_t begin, std::size_t count) {
    const std::size_t d = features.cols();
    for (std::size_t p = 0; p < count; ++p) {
      const auto row = features.row(begin + p);
      for (std::size_t c = 0; c < d; ++c) a_[c * kBlock + p] = row[c];
    }
    double* in = a_.data();
    double* out = b_.data();
    const auto& layers = params_.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const DenseLayer& layer = layers[l];
      const bool hidden = l + 1 < layers.size();
      const std::size_t fan_in = layer.in();
      for (std::size_t o = 0; o < layer.out(); ++o) {
        double* __restrict acc = out + o * kBlock;
        std::fill(acc, acc + kBlock, 0.0);
        const double* w = layer.weight.row(o).data();
        for (std::size_t i = 0; i < fan_in; ++i) {
          const double wi = w[i];
          const double* __restrict x = in + i * kBlock;
          for (std::size_t p = 0; p < kBlock; ++p) acc[p] += wi * x[p];
        }
        const double bias = layer.bias[o];
        if (!hidden) {
          for (std::size_t p = 0; p < kBlock; ++p) acc[p] = acc[p] + bias;
        } else if (params_.activation() == Activation::kRelu) {
          for (std::size_t p = 0; p < kBlock; ++p) {
            const double v = acc[p] + bias;
            acc[p] = v > 0.0 ? v : 0.0;
          }
        } else {
          for (std::size_t p = 0; p < kBlock; ++p) acc[p] = std::tanh(acc[p] + bias);
        }
      }
      std::swap(in, out);
    }
    return in;
  }

 private:
  const SftfParams& params_;
  std::vector<double> a_, b_;
};

void check_features(const DenseMatrix& features, const SftfParams& params) {
  if (params.layers().empty()) throw Error(ErrorCode::kInvalidArgument, "SFTF has no layers");
  if (features.cols() != params.input_width())
    throw Error(ErrorCode::kShapeMismatch, "features have " + std::to_string(features.cols()) +
                                               " columns, SFTF expects " + std::to_string(params.input_width()));
}

void check_group_size(std::size_t n, std::size_t m) {
  if (n > m)
    throw Error(ErrorCode::kGroupSizeTooLarge,
                "group size " + std::to_string(n) + " exceeds " + std::to_string(m) + " points");
}

/// Top-n by (membership desc, index asc) that also remembers the raw
/// correlation of its worst entry, so candidates whose correlation does not
/// exceed it are rejected before the sigmoid is evaluated.
class AreaSelector {
 public:
  struct Entry {
    double q;
    double corr;
    Index index;
  };

  explicit AreaSelector(std::size_t capacity) : capacity_(capacity) { heap_.reserve(capacity); }

  static bool better(const Entry& a, const Entry& b) { return a.q > b.q || (a.q == b.q && a.index < b.index); }

  double corr_threshold() const { return corr_threshold_; }

  void offer(const Entry& e) {
    if (heap_.size() < capacity_) {
      heap_.push_back(e);
      std::push_heap(heap_.begin(), heap_.end(), better);
      if (heap_.size() == capacity_) corr_threshold_ = heap_.front().corr;
      return;
    }
    if (!better(e, heap_.front())) return;
    std::pop_heap(heap_.begin(), heap_.end(), better);
    heap_.back() = e;
    std::push_heap(heap_.begin(), heap_.end(), better);
    corr_threshold_ = heap_.front().corr;
  }

  void merge(const AreaSelector& other) {
    for (const Entry& e : other.heap_) offer(e);
  }

  std::vector<Entry> take_sorted() {
    std::sort_heap(heap_.begin(), heap_.end(), better);
    return std::move(heap_);
  }

 private:
  std::size_t capacity_;
  std::vector<Entry> heap_;
  double corr_threshold_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

SftfParams::SftfParams(std::vector<DenseLayer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
  if (layers_.empty()) throw Error(ErrorCode::kInvalidArgument, "SFTF needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.out())
      throw Error(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " bias length does not match");
    if (l > 0 && layer.in() != layers_[l - 1].out())
      throw Error(ErrorCode::kShapeMismatch, "layer " + std::to_string(l) + " input width does not match");
    if (layer.in() == 0 || layer.out() == 0)
      throw Error(ErrorCode::kInvalidArgument, "layer widths must be positive");
    if (!layer.weight.all_finite())
      throw Error(ErrorCode::kInvalidArgument, "layer " + std::to_string(l) + " has non-finite weights");
    for (double b : layer.bias)
      if (!std::isfinite(b)) throw Error(ErrorCode::kInvalidArgument, "layer " + std::to_string(l) + " has non-finite bias");
  }
}

SftfParams SftfParams::zeros(std::span<const std::size_t> channels, Activation activation) {
  if (channels.size() < 2) throw Error(ErrorCode::kInvalidArgument, "channel list needs at least two widths");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < channels.size(); ++l)
    layers.push_back({DenseMatrix(channels[l + 1], channels[l]), std::vector<double>(channels[l + 1], 0.0)});
  return SftfParams(std::move(layers), activation);
}

SftfParams SftfParams::random(std::span<const std::size_t> channels, SeededRng& rng, Activation activation) {
  SftfParams p = zeros(channels, activation);
  for (auto& layer : p.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in()));
    for (double& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
  }
  return p;
}

std::vector<std::size_t> SftfParams::channels() const {
  std::vector<std::size_t> c;
  if (layers_.empty()) return c;
  c.push_back(layers_.front().in());
  for (const auto& layer : layers_) c.push_back(layer.out());
  return c;
}

std::size_t SftfParams::num_parameters() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.weight.size() + layer.bias.size();
  return total;
}

std::vector<std::size_t> default_channels(std::size_t d, std::size_t s) { return {d, 32, 128, s}; }

MembershipMatrix::MembershipMatrix(DenseMatrix values) : values_(std::move(values)) {
  for (double v : values_.data())
    if (!(v > 0.0 && v < 1.0)) throw Error(ErrorCode::kInvalidArgument, "membership entries must lie in (0, 1)");
}

double membership_sigmoid(double x) {
  // 1 / (1 + e^-x) is a chain of monotone roundings, hence monotone in x;
  // the fused selection in structure() relies on that.
  const double v = 1.0 / (1.0 + std::exp(-x));
  return std::clamp(v, kMembershipLow, kMembershipHigh);
}

DenseMatrix sftf_forward(const DenseMatrix& features, const SftfParams& params, int threads) {
  check_features(features, params);
  const std::size_t m = features.rows();
  const std::size_t s = params.num_areas();
  DenseMatrix out(m, s);
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  parallel_chunks(blocks, threads, [&](std::size_t, std::size_t b0, std::size_t b1) {
    BlockForward block(params);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t begin = b * kBlock;
      const std::size_t count = std::min(kBlock, m - begin);
      const double* y = block.run(features, begin, count);
      for (std::size_t p = 0; p < count; ++p) {
        auto row = out.row(begin + p);
        for (std::size_t j = 0; j < s; ++j) row[j] = y[j * kBlock + p];
      }
    }
  });
  return out;
}

MembershipMatrix membership(const DenseMatrix& correlations) {
  if (!correlations.all_finite()) throw Error(ErrorCode::kInvalidArgument, "correlations must be finite");
  DenseMatrix q(correlations.rows(), correlations.cols());
  const auto src = correlations.data();
  auto dst = q.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = membership_sigmoid(src[k]);
  return MembershipMatrix(std::move(q));
}

IndexTable group_indices(const MembershipMatrix& q, std::size_t n, int threads) {
  const std::size_t m = q.num_points();
  const std::size_t s = q.num_areas();
  check_group_size(n, m);
  IndexTable out(s, n);
  parallel_chunks(s, threads, [&](std::size_t, std::size_t j0, std::size_t j1) {
    for (std::size_t j = j0; j < j1; ++j) {
      TopSelector sel(n);
      for (std::size_t i = 0; i < m; ++i) {
        const double key = -q(i, j);
        if (!sel.full() || key < sel.threshold()) sel.offer(key, static_cast<Index>(i));
      }
      const auto sorted = sel.take_sorted();
      auto row = out.row(j);
      for (std::size_t t = 0; t < n; ++t) row[t] = sorted[t].index;
    }
  });
  return out;
}

std::vector<Index> sample_indices(const MembershipMatrix& q) {
  std::vector<Index> out(q.num_areas(), 0);
  std::vector<double> best(q.num_areas(), -1.0);
  for (std::size_t i = 0; i < q.num_points(); ++i)
    for (std::size_t j = 0; j < q.num_areas(); ++j)
      if (q(i, j) > best[j]) {
        best[j] = q(i, j);
        out[j] = static_cast<Index>(i);
      }
  return out;
}

StructuringResult structure(const PointCloud& cloud, const SftfParams& params, std::size_t n,
                            const StructureOptions& options) {
  const DenseMatrix features = make_features(cloud, options.features);
  check_features(features, params);
  const std::size_t m = cloud.size();
  const std::size_t s = params.num_areas();
  check_group_size(n, m);
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "group size must be at least 1");

  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  const std::size_t chunks = chunk_count(blocks, options.threads);
  std::vector<std::vector<AreaSelector>> partial(chunks);
  parallel_chunks(blocks, options.threads, [&](std::size_t chunk, std::size_t b0, std::size_t b1) {
    auto& selectors = partial[chunk];
    selectors.assign(s, AreaSelector(n));
    BlockForward block(params);
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t begin = b * kBlock;
      const std::size_t count = std::min(kBlock, m - begin);
      const double* y = block.run(features, begin, count);
      for (std::size_t j = 0; j < s; ++j) {
        const double* col = y + j * kBlock;
        AreaSelector& sel = selectors[j];
        double thr = sel.corr_threshold();
        // Monotone sigmoid: corr <= thr implies membership <= the worst
        // kept one, and a later index loses the tie.
        bool any = false;
        for (std::size_t p = 0; p < count; ++p) any |= col[p] > thr;
        if (!any) continue;
        for (std::size_t p = 0; p < count; ++p) {
          if (col[p] > thr) {
            sel.offer({membership_sigmoid(col[p]), col[p], static_cast<Index>(begin + p)});
            thr = sel.corr_threshold();
          }
        }
      }
    }
  });

  for (std::size_t c = 1; c < chunks; ++c)
    for (std::size_t j = 0; j < s; ++j) partial[0][j].merge(partial[c][j]);

  std::vector<Index> samples(s);
  IndexTable groups(s, n);
  for (std::size_t j = 0; j < s; ++j) {
    const auto sorted = partial[0][j].take_sorted();
    auto row = groups.row(j);
    for (std::size_t t = 0; t < n; ++t) row[t] = sorted[t].index;
    samples[j] = row[0];
  }
  return make_result(cloud, std::move(samples), std::move(groups));
}

SampleAndGroup sample_and_group(const PointCloud& cloud, const SftfParams& params, std::size_t n,
                                const std::optional<DenseMatrix>& extra_features, const StructureOptions& options) {
  if (extra_features && extra_features->rows() != cloud.size())
    throw Error(ErrorCode::kShapeMismatch, "extra features row count does not match the cloud");
  return package_sample_and_group(cloud, structure(cloud, params, n, options), extra_features);
}

}  // namespace psnet
