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

#ifndef PSNET_TAPE_HPP_
#define PSNET_TAPE_HPP_

#include <cstddef>
#include <vector>

#include "psnet/core.hpp"

// Minimal reverse-mode automatic differentiation over dense matrices.
//
// Every primitive records its inputs on a Tape and computes its value
// eagerly. backward() walks the tape in reverse and accumulates exact
// gradients. Index arguments (gather rows, segment argmax, labels) are plain
// integers and never receive gradient.
namespace psnet::ad {

struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

enum class Op {
  kLeaf,
  kMatmul,
  kAddBias,
  kAdd,
  kSub,
  kScale,
  kRelu,
  kTanh,
  kSigmoid,
  kLog,
  kSoftmaxColumns,
  kSoftmaxRows,
  kGatherRows,
  kSegmentMax,
  kMeanRows,
  kCrossEntropy,
};

class Tape {
 public:
  /// Leaf node. Parameters and differentiable inputs set requires_grad.
  Var leaf(DenseMatrix value, bool requires_grad = false);

  /// op(a) * op(b) with op = transpose when requested.
  Var matmul(Var a, Var b, bool transpose_a = false, bool transpose_b = false);
  /// x + 1 * bias, bias is 1 x cols.
  Var add_bias(Var x, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var scale(Var x, double factor);
  Var relu(Var x);
  Var tanh(Var x);
  /// Clamped sigmoid used for membership probabilities.
  Var sigmoid(Var x);
  Var log(Var x);
  Var softmax_columns(Var x);
  Var softmax_rows(Var x);
  /// out[r] = src[indices[r]]; gradient scatter-adds back to src.
  Var gather_rows(Var src, std::vector<Index> indices);
  /// Max over consecutive blocks of `segment` rows, per column. Gradient goes
  /// to the first row attaining the max.
  Var segment_max(Var x, std::size_t segment);
  Var mean_rows(Var x);
  /// -ln(p[label]) for a 1 x M probability row. p[label] below 1e-12 is
  /// clamped and counted in clamped_probabilities().
  Var cross_entropy(Var probs, std::size_t label);

  const DenseMatrix& value(Var v) const { return nodes_.at(v.id).value; }
  /// Gradient of the last backward() target; zero matrix if unreached.
  const DenseMatrix& grad(Var v) const { return nodes_.at(v.id).grad; }
  /// True when the last backward() reached this node through the graph.
  bool reached(Var v) const { return nodes_.at(v.id).reached; }

  /// Reverse accumulation from a 1 x 1 node.
  void backward(Var loss);

  /// Recomputes every node from its recorded inputs and reports whether all
  /// values reproduce bit for bit.
  bool replay_matches() const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t clamped_probabilities() const { return clamped_; }
  Op op(Var v) const { return nodes_.at(v.id).op; }

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::vector<std::size_t> inputs;
    DenseMatrix value;
    DenseMatrix grad;
    bool requires_grad = false;
    bool reached = false;
    // Op payloads.
    bool ta = false, tb = false;
    double factor = 1.0;
    std::size_t segment = 0;
    std::vector<Index> indices;
  };

  Var push(Node node);
  DenseMatrix compute(const Node& node) const;
  void accumulate(std::size_t id, const DenseMatrix& g);
  void backward_node(std::size_t id);

  std::vector<Node> nodes_;
  std::size_t clamped_ = 0;
};

/// Plain matrix helpers shared with the non-tape code paths. Each output
/// entry is sum_k a(i,k) * b(k,j) accumulated from 0.0 in increasing k.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, bool transpose_a = false,
                   bool transpose_b = false);

}  // namespace psnet::ad

#endif  // PSNET_TAPE_HPP_
