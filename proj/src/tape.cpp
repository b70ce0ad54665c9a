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

#include "psnet/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "psnet/psnet.hpp"

namespace psnet::ad {
namespace {

constexpr double kProbabilityFloor = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

DenseMatrix zeros_like(const DenseMatrix& m) { return DenseMatrix(m.rows(), m.cols()); }

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, bool transpose_a, bool transpose_b) {
  const std::size_t rows = transpose_a ? a.cols() : a.rows();
  const std::size_t inner = transpose_a ? a.rows() : a.cols();
  const std::size_t inner_b = transpose_b ? b.cols() : b.rows();
  const std::size_t cols = transpose_b ? b.rows() : b.cols();
  require(inner == inner_b, "matmul inner dimensions differ");
  DenseMatrix out(rows, cols);
  if (!transpose_a && !transpose_b) {
    for (std::size_t i = 0; i < rows; ++i) {
      double* o = out.row(i).data();
      for (std::size_t k = 0; k < inner; ++k) {
        const double av = a(i, k);
        const double* br = b.row(k).data();
        for (std::size_t j = 0; j < cols; ++j) o[j] += av * br[j];
      }
    }
  } else if (!transpose_a && transpose_b) {
    for (std::size_t i = 0; i < rows; ++i) {
      const double* ar = a.row(i).data();
      for (std::size_t j = 0; j < cols; ++j) {
        const double* br = b.row(j).data();
        double acc = 0.0;
        for (std::size_t k = 0; k < inner; ++k) acc += br[k] * ar[k];
        out(i, j) = acc;
      }
    }
  } else if (transpose_a && !transpose_b) {
    for (std::size_t k = 0; k < inner; ++k) {
      const double* ar = a.row(k).data();
      const double* br = b.row(k).data();
      for (std::size_t i = 0; i < rows; ++i) {
        const double av = ar[i];
        double* o = out.row(i).data();
        for (std::size_t j = 0; j < cols; ++j) o[j] += av * br[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < inner; ++k) acc += a(k, i) * b(j, k);
        out(i, j) = acc;
      }
  }
  return out;
}

Var Tape::push(Node node) {
  node.value = compute(node);
  for (std::size_t in : node.inputs) node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::leaf(DenseMatrix value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::matmul(Var a, Var b, bool transpose_a, bool transpose_b) {
  Node n;
  n.op = Op::kMatmul;
  n.inputs = {a.id, b.id};
  n.ta = transpose_a;
  n.tb = transpose_b;
  return push(std::move(n));
}

Var Tape::add_bias(Var x, Var bias) {
  require(value(bias).rows() == 1 && value(bias).cols() == value(x).cols(), "bias must be 1 x cols");
  Node n;
  n.op = Op::kAddBias;
  n.inputs = {x.id, bias.id};
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "add shapes differ");
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a.id, b.id};
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  require(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "sub shapes differ");
  Node n;
  n.op = Op::kSub;
  n.inputs = {a.id, b.id};
  return push(std::move(n));
}

Var Tape::scale(Var x, double factor) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {x.id};
  n.factor = factor;
  return push(std::move(n));
}

#define PSNET_UNARY(name, opcode)  \
  Var Tape::name(Var x) {          \
    Node n;                        \
    n.op = opcode;                 \
    n.inputs = {x.id};             \
    return push(std::move(n));     \
  }
PSNET_UNARY(relu, Op::kRelu)
PSNET_UNARY(tanh, Op::kTanh)
PSNET_UNARY(sigmoid, Op::kSigmoid)
PSNET_UNARY(log, Op::kLog)
PSNET_UNARY(softmax_columns, Op::kSoftmaxColumns)
PSNET_UNARY(softmax_rows, Op::kSoftmaxRows)
PSNET_UNARY(mean_rows, Op::kMeanRows)
#undef PSNET_UNARY

Var Tape::gather_rows(Var src, std::vector<Index> indices) {
  for (Index i : indices) require(i < value(src).rows(), "gather index out of range");
  Node n;
  n.op = Op::kGatherRows;
  n.inputs = {src.id};
  n.indices = std::move(indices);
  return push(std::move(n));
}

Var Tape::segment_max(Var x, std::size_t segment) {
  require(segment > 0 && value(x).rows() % segment == 0, "segment must divide the row count");
  Node n;
  n.op = Op::kSegmentMax;
  n.inputs = {x.id};
  n.segment = segment;
  return push(std::move(n));
}

Var Tape::cross_entropy(Var probs, std::size_t label) {
  require(value(probs).rows() == 1 && label < value(probs).cols(), "cross entropy expects a 1 x M row");
  if (value(probs)(0, label) < kProbabilityFloor) ++clamped_;
  Node n;
  n.op = Op::kCrossEntropy;
  n.inputs = {probs.id};
  n.segment = label;
  return push(std::move(n));
}

DenseMatrix Tape::compute(const Node& node) const {
  auto in = [&](std::size_t k) -> const DenseMatrix& { return nodes_[node.inputs[k]].value; };
  switch (node.op) {
    case Op::kLeaf:
      return node.value;
    case Op::kMatmul:
      return ad::matmul(in(0), in(1), node.ta, node.tb);
    case Op::kAddBias: {
      DenseMatrix out = in(0);
      const auto b = in(1).row(0);
      for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c) row[c] = row[c] + b[c];
      }
      return out;
    }
    case Op::kAdd:
    case Op::kSub: {
      DenseMatrix out = in(0);
      const auto other = in(1).data();
      auto dst = out.data();
      const double sign = node.op == Op::kAdd ? 1.0 : -1.0;
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = sign > 0 ? dst[k] + other[k] : dst[k] - other[k];
      return out;
    }
    case Op::kScale: {
      DenseMatrix out = in(0);
      for (double& v : out.data()) v *= node.factor;
      return out;
    }
    case Op::kRelu: {
      DenseMatrix out = in(0);
      for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
      return out;
    }
    case Op::kTanh: {
      DenseMatrix out = in(0);
      for (double& v : out.data()) v = std::tanh(v);
      return out;
    }
    case Op::kSigmoid: {
      DenseMatrix out = in(0);
      for (double& v : out.data()) v = membership_sigmoid(v);
      return out;
    }
    case Op::kLog: {
      DenseMatrix out = in(0);
      for (double& v : out.data()) v = std::log(v);
      return out;
    }
    case Op::kSoftmaxColumns: {
      const DenseMatrix& x = in(0);
      DenseMatrix out(x.rows(), x.cols());
      for (std::size_t c = 0; c < x.cols(); ++c) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < x.rows(); ++r) mx = std::max(mx, x(r, c));
        double total = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
          out(r, c) = std::exp(x(r, c) - mx);
          total += out(r, c);
        }
        for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) /= total;
      }
      return out;
    }
    case Op::kSoftmaxRows: {
      const DenseMatrix& x = in(0);
      DenseMatrix out(x.rows(), x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
        double total = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
          out(r, c) = std::exp(x(r, c) - mx);
          total += out(r, c);
        }
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= total;
      }
      return out;
    }
    case Op::kGatherRows: {
      const DenseMatrix& x = in(0);
      DenseMatrix out(node.indices.size(), x.cols());
      for (std::size_t r = 0; r < node.indices.size(); ++r) {
        const auto src = x.row(node.indices[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
      }
      return out;
    }
    case Op::kSegmentMax: {
      const DenseMatrix& x = in(0);
      const std::size_t groups = x.rows() / node.segment;
      DenseMatrix out(groups, x.cols());
      for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t c = 0; c < x.cols(); ++c) {
          double mx = x(g * node.segment, c);
          for (std::size_t t = 1; t < node.segment; ++t) mx = std::max(mx, x(g * node.segment + t, c));
          out(g, c) = mx;
        }
      return out;
    }
    case Op::kMeanRows: {
      const DenseMatrix& x = in(0);
      DenseMatrix out(1, x.cols());
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
      for (double& v : out.data()) v /= static_cast<double>(x.rows());
      return out;
    }
    case Op::kCrossEntropy: {
      const double p = in(0)(0, node.segment);
      return DenseMatrix(1, 1, {-std::log(std::max(p, kProbabilityFloor))});
    }
  }
  return {};
}

void Tape::accumulate(std::size_t id, const DenseMatrix& g) {
  Node& n = nodes_[id];
  n.reached = true;
  auto dst = n.grad.data();
  const auto src = g.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
}

void Tape::backward(Var loss) {
  require(value(loss).rows() == 1 && value(loss).cols() == 1, "backward needs a scalar node");
  for (auto& n : nodes_) {
    n.grad = zeros_like(n.value);
    n.reached = false;
  }
  nodes_[loss.id].grad(0, 0) = 1.0;
  nodes_[loss.id].reached = true;
  for (std::size_t id = loss.id + 1; id-- > 0;)
    if (nodes_[id].reached && nodes_[id].requires_grad) backward_node(id);
}

void Tape::backward_node(std::size_t id) {
  const Node& n = nodes_[id];
  const DenseMatrix& g = n.grad;
  auto input_needs = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
  auto in = [&](std::size_t k) -> const DenseMatrix& { return nodes_[n.inputs[k]].value; };

  switch (n.op) {
    case Op::kLeaf:
      return;
    case Op::kMatmul: {
      const DenseMatrix& a = in(0);
      const DenseMatrix& b = in(1);
      if (input_needs(0))
        accumulate(n.inputs[0], n.ta ? ad::matmul(b, g, n.tb, true) : ad::matmul(g, b, false, !n.tb));
      if (input_needs(1))
        accumulate(n.inputs[1], n.tb ? ad::matmul(g, a, true, n.ta) : ad::matmul(a, g, !n.ta, false));
      return;
    }
    case Op::kAddBias: {
      if (input_needs(0)) accumulate(n.inputs[0], g);
      if (input_needs(1)) {
        DenseMatrix db(1, g.cols());
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) db(0, c) += g(r, c);
        accumulate(n.inputs[1], db);
      }
      return;
    }
    case Op::kAdd:
    case Op::kSub: {
      if (input_needs(0)) accumulate(n.inputs[0], g);
      if (input_needs(1)) {
        if (n.op == Op::kAdd) {
          accumulate(n.inputs[1], g);
        } else {
          DenseMatrix neg = g;
          for (double& v : neg.data()) v = -v;
          accumulate(n.inputs[1], neg);
        }
      }
      return;
    }
    case Op::kScale: {
      DenseMatrix d = g;
      for (double& v : d.data()) v *= n.factor;
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kRelu:
    case Op::kTanh:
    case Op::kSigmoid:
    case Op::kLog: {
      DenseMatrix d = g;
      const auto x = in(0).data();
      const auto y = n.value.data();
      auto dd = d.data();
      for (std::size_t k = 0; k < dd.size(); ++k) {
        switch (n.op) {
          case Op::kRelu: dd[k] = x[k] > 0.0 ? dd[k] : 0.0; break;
          case Op::kTanh: dd[k] *= 1.0 - y[k] * y[k]; break;
          case Op::kSigmoid: dd[k] *= y[k] * (1.0 - y[k]); break;
          default: dd[k] /= x[k]; break;
        }
      }
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kSoftmaxColumns: {
      const DenseMatrix& y = n.value;
      DenseMatrix d(y.rows(), y.cols());
      for (std::size_t c = 0; c < y.cols(); ++c) {
        double dot = 0.0;
        for (std::size_t r = 0; r < y.rows(); ++r) dot += y(r, c) * g(r, c);
        for (std::size_t r = 0; r < y.rows(); ++r) d(r, c) = y(r, c) * (g(r, c) - dot);
      }
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kSoftmaxRows: {
      const DenseMatrix& y = n.value;
      DenseMatrix d(y.rows(), y.cols());
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += y(r, c) * g(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) = y(r, c) * (g(r, c) - dot);
      }
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kGatherRows: {
      DenseMatrix d = zeros_like(in(0));
      for (std::size_t r = 0; r < n.indices.size(); ++r) {
        auto dst = d.row(n.indices[r]);
        const auto src = g.row(r);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
      }
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kSegmentMax: {
      const DenseMatrix& x = in(0);
      DenseMatrix d = zeros_like(x);
      for (std::size_t grp = 0; grp < n.value.rows(); ++grp)
        for (std::size_t c = 0; c < x.cols(); ++c) {
          std::size_t arg = grp * n.segment;
          for (std::size_t t = 1; t < n.segment; ++t)
            if (x(grp * n.segment + t, c) > x(arg, c)) arg = grp * n.segment + t;
          d(arg, c) += g(grp, c);
        }
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kMeanRows: {
      const DenseMatrix& x = in(0);
      DenseMatrix d(x.rows(), x.cols());
      const double inv = 1.0 / static_cast<double>(x.rows());
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) d(r, c) = g(0, c) * inv;
      accumulate(n.inputs[0], d);
      return;
    }
    case Op::kCrossEntropy: {
      DenseMatrix d = zeros_like(in(0));
      const double p = std::max(in(0)(0, n.segment), kProbabilityFloor);
      d(0, n.segment) = -g(0, 0) / p;
      accumulate(n.inputs[0], d);
      return;
    }
  }
}

bool Tape::replay_matches() const {
  for (const Node& n : nodes_)
    if (n.op != Op::kLeaf && !(compute(n) == n.value)) return false;
  return true;
}

}  // namespace psnet::ad
