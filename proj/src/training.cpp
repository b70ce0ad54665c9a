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

#include "psnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "json.hpp"

#include "psnet/tape.hpp"

namespace psnet::training {
namespace {

DenseMatrix bias_row(const std::vector<double>& bias) { return DenseMatrix(1, bias.size(), bias); }

std::vector<DenseLayer> random_layers(std::span<const std::size_t> widths, SeededRng& rng) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer{DenseMatrix(widths[l + 1], widths[l]), std::vector<double>(widths[l + 1], 0.0)};
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    for (double& w : layer.weight.data()) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::vector<std::size_t> head_channel_list(std::span<const std::size_t> widths) {
  std::vector<std::size_t> out{3};
  out.insert(out.end(), widths.begin(), widths.end());
  return out;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double GumbelConfig::temperature_at(std::size_t epoch, std::size_t epochs) const {
  if (decay == TemperatureDecay::kConstant || epochs <= 1) return initial_temperature;
  const double t = static_cast<double>(std::min(epoch, epochs - 1)) / static_cast<double>(epochs - 1);
  if (decay == TemperatureDecay::kLinear) return initial_temperature + t * (final_temperature - initial_temperature);
  return initial_temperature * std::pow(final_temperature / initial_temperature, t);
}

double gumbel_transform(double u) { return -std::log(-std::log(u)); }

DenseMatrix gumbel_noise(std::size_t rows, std::size_t cols, SeededRng& rng) {
  DenseMatrix out(rows, cols);
  for (double& v : out.data()) v = gumbel_transform(rng.uniform_open());
  return out;
}

SoftSampleMatrix::SoftSampleMatrix(DenseMatrix values) : values_(std::move(values)) {
  for (std::size_t c = 0; c < values_.cols(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < values_.rows(); ++r) {
      const double v = values_(r, c);
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "soft sample entries must lie in [0, 1]");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw Error(ErrorCode::kInvalidArgument, "soft sample column " + std::to_string(c) + " does not sum to 1");
  }
}

SoftSampleMatrix gumbel_softmax_columns(const MembershipMatrix& q, const GumbelConfig& cfg, SeededRng& rng) {
  if (!(cfg.temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  const std::size_t m = q.num_points();
  const std::size_t s = q.num_areas();
  DenseMatrix logits(m, s);
  const DenseMatrix noise = cfg.noise_enabled ? gumbel_noise(m, s, rng) : DenseMatrix(m, s);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < s; ++j) logits(i, j) = (std::log(q(i, j)) + noise(i, j)) / cfg.temperature;
  DenseMatrix out(m, s);
  for (std::size_t j = 0; j < s; ++j) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, logits(i, j));
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      out(i, j) = std::exp(logits(i, j) - mx);
      total += out(i, j);
    }
    for (std::size_t i = 0; i < m; ++i) out(i, j) /= total;
  }
  return SoftSampleMatrix(std::move(out));
}

DenseMatrix soft_sample(const SoftSampleMatrix& soft, const PointCloud& cloud) {
  if (soft.num_points() != cloud.size())
    throw Error(ErrorCode::kShapeMismatch, "soft sample matrix rows do not match the cloud size");
  return ad::matmul(soft.values(), coordinates(cloud), true, false);
}

double cross_entropy(std::span<const double> probs, std::size_t label, std::size_t* clamped) {
  if (label >= probs.size()) throw Error(ErrorCode::kInvalidArgument, "label out of range");
  double p = probs[label];
  if (p < 1e-12) {
    p = 1e-12;
    if (clamped) ++*clamped;
  }
  return -std::log(p);
}

HeadParams HeadParams::zeros(std::span<const std::size_t> widths, std::size_t classes) {
  if (widths.empty()) throw Error(ErrorCode::kInvalidArgument, "head needs at least one pointwise layer");
  const auto channels = head_channel_list(widths);
  HeadParams h;
  for (std::size_t l = 0; l + 1 < channels.size(); ++l)
    h.pointwise.push_back({DenseMatrix(channels[l + 1], channels[l]), std::vector<double>(channels[l + 1], 0.0)});
  h.classifier = {DenseMatrix(classes, widths.back()), std::vector<double>(classes, 0.0)};
  return h;
}

HeadParams HeadParams::random(std::span<const std::size_t> widths, std::size_t classes, SeededRng& rng) {
  if (widths.empty()) throw Error(ErrorCode::kInvalidArgument, "head needs at least one pointwise layer");
  HeadParams h;
  h.pointwise = random_layers(head_channel_list(widths), rng);
  const std::size_t last[2] = {widths.back(), classes};
  h.classifier = std::move(random_layers(last, rng).front());
  return h;
}

Tensor3 recenter(const Tensor3& grouped_xyz, const DenseMatrix& centers) {
  if (centers.rows() != grouped_xyz.dim0 || centers.cols() != grouped_xyz.dim2)
    throw Error(ErrorCode::kShapeMismatch, "centres do not match the grouped coordinates");
  Tensor3 out = grouped_xyz;
  for (std::size_t j = 0; j < out.dim0; ++j)
    for (std::size_t t = 0; t < out.dim1; ++t)
      for (std::size_t k = 0; k < out.dim2; ++k) out(j, t, k) = grouped_xyz(j, t, k) - centers(j, k);
  return out;
}

std::vector<double> toy_head_forward(const Tensor3& recentered, const HeadParams& head) {
  if (recentered.dim2 != 3 || head.pointwise.empty() || head.pointwise.front().in() != 3)
    throw Error(ErrorCode::kShapeMismatch, "head expects 3-D recentred coordinates");
  if (head.classifier.in() != head.pointwise.back().out())
    throw Error(ErrorCode::kShapeMismatch, "classifier width does not match the pointwise layers");
  const std::size_t groups = recentered.dim0;
  const std::size_t members = recentered.dim1;
  const std::size_t width = head.pointwise.back().out();
  std::vector<double> pooled(width, 0.0);
  std::vector<double> group_max(width);
  std::vector<double> cur, next;
  for (std::size_t j = 0; j < groups; ++j) {
    for (std::size_t t = 0; t < members; ++t) {
      cur.assign({recentered(j, t, 0), recentered(j, t, 1), recentered(j, t, 2)});
      for (const auto& layer : head.pointwise) {
        next.assign(layer.out(), 0.0);
        for (std::size_t o = 0; o < layer.out(); ++o) {
          double acc = 0.0;
          for (std::size_t i = 0; i < layer.in(); ++i) acc += layer.weight(o, i) * cur[i];
          const double v = acc + layer.bias[o];
          next[o] = v > 0.0 ? v : 0.0;
        }
        cur.swap(next);
      }
      for (std::size_t c = 0; c < width; ++c) group_max[c] = t == 0 ? cur[c] : std::max(group_max[c], cur[c]);
    }
    for (std::size_t c = 0; c < width; ++c) pooled[c] += group_max[c];
  }
  for (double& v : pooled) v /= static_cast<double>(groups);
  std::vector<double> logits(head.num_classes());
  for (std::size_t o = 0; o < logits.size(); ++o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < width; ++i) acc += head.classifier.weight(o, i) * pooled[i];
    logits[o] = acc + head.classifier.bias[o];
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : logits) v /= total;
  return logits;
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kPsnet: return "psnet";
    case Method::kFpsKnn: return "fps_knn";
    case Method::kRandomKnn: return "random_knn";
    case Method::kPsnetSamplingBallQuery: return "psnet_sampling_ball_query";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "psnet") return Method::kPsnet;
  if (name == "fps_knn") return Method::kFpsKnn;
  if (name == "random_knn" || name == "random") return Method::kRandomKnn;
  if (name == "psnet_sampling_ball_query" || name == "psnet_bq") return Method::kPsnetSamplingBallQuery;
  throw Error(ErrorCode::kInvalidArgument, "unknown structuring method '" + std::string(name) + "'");
}

bool method_uses_sftf(Method method) {
  return method == Method::kPsnet || method == Method::kPsnetSamplingBallQuery;
}

synth::Dataset synth_dataset(const ToyTaskConfig& cfg) {
  if (cfg.classes < 2) throw Error(ErrorCode::kInvalidArgument, "the toy task needs at least two classes");
  synth::DatasetConfig dc;
  dc.families = cfg.symmetric_shapes ? synth::symmetric_families(cfg.classes) : synth::general_families(cfg.classes);
  dc.train_per_class = cfg.shapes_per_class;
  dc.test_per_class = cfg.test_shapes_per_class;
  dc.points = cfg.points;
  dc.augmentation = cfg.augmentation;
  return synth::make_dataset(dc, cfg.seed);
}

std::vector<std::span<double>> ToyModel::parameters() {
  std::vector<std::span<double>> out;
  for (auto& layer : sftf.mutable_layers()) {
    out.push_back(layer.weight.data());
    out.push_back(layer.bias);
  }
  for (auto& layer : head.pointwise) {
    out.push_back(layer.weight.data());
    out.push_back(layer.bias);
  }
  out.push_back(head.classifier.weight.data());
  out.push_back(head.classifier.bias);
  return out;
}

std::vector<std::span<const double>> ToyModel::parameters() const {
  auto mut = const_cast<ToyModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

std::size_t ToyModel::num_parameters() const {
  std::size_t total = 0;
  for (const auto& p : parameters()) total += p.size();
  return total;
}

ToyModel init_model(const ToyTaskConfig& cfg, SeededRng& rng) {
  if (cfg.samples == 0 || cfg.group_size == 0) throw Error(ErrorCode::kInvalidArgument, "s and n must be positive");
  std::vector<std::size_t> channels{feature_width(cfg.features)};
  channels.insert(channels.end(), cfg.sftf_hidden.begin(), cfg.sftf_hidden.end());
  channels.push_back(cfg.samples);
  ToyModel model;
  model.sftf = SftfParams::random(channels, rng);
  model.head = HeadParams::random(cfg.head_widths, cfg.classes, rng);
  return model;
}

ForwardResult loss_and_gradient(const ToyModel& model, const synth::LabeledCloud& shape, const ToyTaskConfig& cfg,
                                const ForwardOptions& options) {
  const PointCloud& cloud = shape.cloud;
  const std::size_t m = cloud.size();
  const std::size_t n = cfg.group_size;
  if (n > m) throw Error(ErrorCode::kGroupSizeTooLarge, "group size exceeds the point count");
  if (shape.label >= model.head.num_classes()) throw Error(ErrorCode::kInvalidArgument, "label out of range");

  ad::Tape tape;
  const ad::Var points = tape.leaf(coordinates(cloud), options.point_gradient);

  std::vector<ad::Var> params;
  auto add_layer = [&](const DenseLayer& layer) {
    params.push_back(tape.leaf(layer.weight, true));
    params.push_back(tape.leaf(bias_row(layer.bias), true));
  };
  for (const auto& layer : model.sftf.layers()) add_layer(layer);
  for (const auto& layer : model.head.pointwise) add_layer(layer);
  add_layer(model.head.classifier);

  ForwardResult result;
  ad::Var centers;
  if (method_uses_sftf(cfg.method)) {
    ad::Var h = tape.leaf(make_features(cloud, cfg.features));
    const auto& layers = model.sftf.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      h = tape.add_bias(tape.matmul(h, params[2 * l], false, true), params[2 * l + 1]);
      if (l + 1 < layers.size())
        h = model.sftf.activation() == Activation::kRelu ? tape.relu(h) : tape.tanh(h);
    }
    if (!tape.value(h).all_finite()) throw Error(ErrorCode::kNonFiniteLoss, "non-finite SFTF correlations");
    const ad::Var q = tape.sigmoid(h);
    const MembershipMatrix membership_values(tape.value(q));
    result.sample_indices = sample_indices(membership_values);
    if (options.frozen_groups) {
      result.groups = *options.frozen_groups;
    } else if (cfg.method == Method::kPsnet) {
      result.groups = group_indices(membership_values, n);
    } else {
      result.groups = baselines::ball_query(cloud, result.sample_indices, {cfg.ball_radius, n});
    }
    ad::Var logits = tape.log(q);
    if (options.noise) logits = tape.add(logits, tape.leaf(*options.noise));
    const ad::Var soft = tape.softmax_columns(tape.scale(logits, 1.0 / options.temperature));
    centers = tape.matmul(soft, points, true, false);
  } else {
    if (cfg.method == Method::kFpsKnn) {
      result.sample_indices = baselines::fps(cloud, cfg.samples, 0);
    } else {
      if (!options.rng) throw Error(ErrorCode::kInvalidArgument, "random sampling needs an rng");
      result.sample_indices = baselines::random_sample(cloud, cfg.samples, *options.rng);
    }
    result.groups = options.frozen_groups ? *options.frozen_groups
                                          : baselines::knn_group(cloud, result.sample_indices, n);
    centers = tape.gather_rows(points, result.sample_indices);
  }

  const std::size_t s = result.groups.rows();
  std::vector<Index> owner(s * n);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t t = 0; t < n; ++t) owner[j * n + t] = static_cast<Index>(j);
  const ad::Var members = tape.gather_rows(points, {result.groups.data().begin(), result.groups.data().end()});
  ad::Var x = tape.sub(members, tape.gather_rows(centers, std::move(owner)));

  const std::size_t first_head = 2 * model.sftf.layers().size();
  for (std::size_t l = 0; l < model.head.pointwise.size(); ++l)
    x = tape.relu(tape.add_bias(tape.matmul(x, params[first_head + 2 * l], false, true),
                                params[first_head + 2 * l + 1]));
  const ad::Var pooled = tape.mean_rows(tape.segment_max(x, n));
  const std::size_t cls = params.size() - 2;
  const ad::Var logits = tape.add_bias(tape.matmul(pooled, params[cls], false, true), params[cls + 1]);
  const ad::Var probs = tape.softmax_rows(logits);
  const ad::Var loss = tape.cross_entropy(probs, shape.label);

  tape.backward(loss);

  result.loss = tape.value(loss)(0, 0);
  const auto pr = tape.value(probs).row(0);
  result.probabilities.assign(pr.begin(), pr.end());
  for (const ad::Var& p : params) {
    const auto g = tape.grad(p).data();
    result.gradients.emplace_back(g.begin(), g.end());
    result.connected.push_back(tape.reached(p));
  }
  if (options.point_gradient) result.point_gradient = tape.grad(points);
  if (options.verify_replay) result.tape_replay_ok = tape.replay_matches();
  result.clamped_probabilities = tape.clamped_probabilities();
  return result;
}

StructuringResult structure_for(const ToyModel& model, const PointCloud& cloud, const ToyTaskConfig& cfg,
                                SeededRng& rng) {
  switch (cfg.method) {
    case Method::kPsnet:
      return structure(cloud, model.sftf, cfg.group_size, {cfg.features, 1});
    case Method::kPsnetSamplingBallQuery: {
      auto samples = structure(cloud, model.sftf, 1, {cfg.features, 1}).sample_indices;
      auto groups = baselines::ball_query(cloud, samples, {cfg.ball_radius, cfg.group_size});
      return make_result(cloud, std::move(samples), std::move(groups));
    }
    case Method::kFpsKnn:
      return baselines::fps_knn_pipeline(cloud, cfg.samples, cfg.group_size);
    case Method::kRandomKnn: {
      auto samples = baselines::random_sample(cloud, cfg.samples, rng);
      auto groups = baselines::knn_group(cloud, samples, cfg.group_size);
      return make_result(cloud, std::move(samples), std::move(groups));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

std::vector<double> predict(const ToyModel& model, const PointCloud& cloud, const ToyTaskConfig& cfg,
                            SeededRng& rng) {
  const StructuringResult r = structure_for(model, cloud, cfg, rng);
  return toy_head_forward(recenter(r.grouped_xyz, r.sampled_xyz), model.head);
}

double accuracy(const ToyModel& model, std::span<const synth::LabeledCloud> shapes, const ToyTaskConfig& cfg,
                std::uint64_t seed) {
  if (shapes.empty()) return 0.0;
  const SeededRng root(seed);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    SeededRng rng = root.child(i);
    if (argmax(predict(model, shapes[i].cloud, cfg, rng)) == shapes[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(shapes.size());
}

TrainResult train(const ToyTaskConfig& cfg) { return train(cfg, synth_dataset(cfg)); }

TrainResult train(const ToyTaskConfig& cfg, const synth::Dataset& data) {
  if (cfg.classes < 2) throw Error(ErrorCode::kInvalidArgument, "the toy task needs at least two classes");
  if (cfg.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  if (data.train.empty()) throw Error(ErrorCode::kInvalidArgument, "empty training set");

  const SeededRng root(cfg.seed);
  SeededRng init_rng = root.child(1);
  TrainResult out;
  out.model = init_model(cfg, init_rng);
  ToyModel& model = out.model;

  auto params = model.parameters();
  std::vector<std::vector<double>> velocity;
  for (const auto& p : params) velocity.emplace_back(p.size(), 0.0);
  std::vector<std::vector<double>> grad_sum = velocity;

  const std::size_t probe_count = std::min<std::size_t>(8, data.test.size());
  auto probe_positions = [&] {
    std::vector<DenseMatrix> pos;
    for (std::size_t i = 0; i < probe_count; ++i) {
      SeededRng rng = root.child(0xD71F7ULL + i);
      pos.push_back(structure_for(model, data.test[i].cloud, cfg, rng).sampled_xyz);
    }
    return pos;
  };
  auto previous = probe_positions();

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double temperature = cfg.gumbel.temperature_at(epoch, cfg.epochs);
    SeededRng shuffle_rng = root.child(0x5EED0000ULL + epoch);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[shuffle_rng.below(k)]);

    double loss_total = 0.0;
    std::size_t correct = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const std::size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      for (auto& g : grad_sum) std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t k = b0; k < b1; ++k) {
        const auto& shape = data.train[order[k]];
        SeededRng shape_rng = root.child((static_cast<std::uint64_t>(epoch + 1) << 32) | order[k]);
        DenseMatrix noise;
        ForwardOptions opts;
        opts.temperature = temperature;
        opts.rng = &shape_rng;
        if (method_uses_sftf(cfg.method) && cfg.gumbel.noise_enabled) {
          noise = gumbel_noise(shape.cloud.size(), cfg.samples, shape_rng);
          opts.noise = &noise;
        }
        const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b0 / cfg.batch_size) +
                                  ", shape " + std::to_string(order[k]) + " (temperature " +
                                  std::to_string(temperature) + ")";
        ForwardResult fr;
        try {
          fr = loss_and_gradient(model, shape, cfg, opts);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNonFiniteLoss) throw;
          throw Error(ErrorCode::kNonFiniteLoss, std::string(e.what()) + " at " + where);
        }
        if (!std::isfinite(fr.loss)) throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss at " + where);
        out.clamped_probabilities += fr.clamped_probabilities;
        loss_total += fr.loss;
        if (argmax(fr.probabilities) == shape.label) ++correct;
        for (std::size_t p = 0; p < grad_sum.size(); ++p)
          for (std::size_t e = 0; e < grad_sum[p].size(); ++e) grad_sum[p][e] += fr.gradients[p][e];
      }
      const double inv = 1.0 / static_cast<double>(b1 - b0);
      for (std::size_t p = 0; p < params.size(); ++p)
        for (std::size_t e = 0; e < params[p].size(); ++e) {
          velocity[p][e] = cfg.momentum * velocity[p][e] + grad_sum[p][e] * inv;
          params[p][e] -= cfg.learning_rate * velocity[p][e];
        }
      for (const auto& p : params)
        for (double v : p)
          if (!std::isfinite(v))
            throw Error(ErrorCode::kNonFiniteLoss, "parameters became non-finite at epoch " + std::to_string(epoch) +
                                                       ", batch " + std::to_string(b0 / cfg.batch_size) +
                                                       " (temperature " + std::to_string(temperature) + ")");
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.loss = loss_total / static_cast<double>(order.size());
    em.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
    em.test_acc = accuracy(model, data.test, cfg, cfg.seed ^ 0x7E57ULL);
    em.temperature = temperature;
    auto current = probe_positions();
    double drift = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < current.size(); ++i)
      for (std::size_t j = 0; j < current[i].rows(); ++j) {
        const auto a = current[i].row(j);
        const auto b = previous[i].row(j);
        drift += std::sqrt(squared_distance({a[0], a[1], a[2]}, {b[0], b[1], b[2]}));
        ++count;
      }
    em.sample_drift = count ? drift / static_cast<double>(count) : 0.0;
    previous = std::move(current);
    out.history.push_back(em);
  }
  return out;
}

std::string metrics_to_json(std::span<const EpochMetrics> history) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : history)
    arr.push_back({{"epoch", e.epoch},
                   {"loss", e.loss},
                   {"train_acc", e.train_acc},
                   {"test_acc", e.test_acc},
                   {"temperature", e.temperature},
                   {"sample_drift", e.sample_drift}});
  return arr.dump(2);
}

}  // namespace psnet::training
