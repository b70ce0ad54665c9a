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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "psnet/error.hpp"
#include "psnet/psnet.hpp"

using namespace psnet;

namespace {

PointCloud random_cloud(std::size_t m, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<Point3> pts(m);
  for (auto& p : pts) p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  return PointCloud(pts);
}

SftfParams random_params(std::vector<std::size_t> channels, std::uint64_t seed,
                         Activation act = Activation::kRelu) {
  SeededRng rng(seed);
  return SftfParams::random(channels, rng, act);
}

// Plain triple loop with the same summation order as the library kernels.
DenseMatrix mlp_oracle(const DenseMatrix& x, const SftfParams& p) {
  DenseMatrix cur = x;
  const auto& layers = p.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseMatrix next(cur.rows(), layers[l].out());
    for (std::size_t i = 0; i < cur.rows(); ++i)
      for (std::size_t o = 0; o < layers[l].out(); ++o) {
        double acc = 0.0;
        for (std::size_t k = 0; k < layers[l].in(); ++k) acc += cur(i, k) * layers[l].weight(o, k);
        double v = acc + layers[l].bias[o];
        if (l + 1 < layers.size()) v = p.activation() == Activation::kRelu ? std::max(v, 0.0) : std::tanh(v);
        next(i, o) = v;
      }
    cur = next;
  }
  return cur;
}

std::vector<Index> top_n_oracle(const MembershipMatrix& q, std::size_t area, std::size_t n) {
  std::vector<Index> idx(q.num_points());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return q(a, area) > q(b, area); });
  idx.resize(n);
  return idx;
}

}  // namespace

TEST_CASE("sftf_forward on a hand-set [5, 2] layer") {
  DenseLayer layer{DenseMatrix(2, 5, std::vector<double>{1, 0, 0, 0.5, -1, 0, 2, 0, 0, 0.25}), {0.1, -0.2}};
  const SftfParams p({layer});
  const DenseMatrix f(3, 5, std::vector<double>{1, 2, 3, 4, 5, 0, 0, 0, 0, 0, -1, 1, 0, 2, 8});
  const DenseMatrix got = sftf_forward(f, p);
  // Row 0: 1 + 2 - 5 + 0.1 = -1.9 ; 4 + 1.25 - 0.2 = 5.05
  CHECK(got(0, 0) == ((1.0 * 1 + 2 * 0 + 3 * 0 + 4 * 0.5 + 5 * -1.0) + 0.1));
  CHECK(got(0, 1) == ((1 * 0.0 + 2 * 2.0 + 0.0 + 0.0 + 5 * 0.25) + -0.2));
  CHECK(got(1, 0) == 0.1);
  CHECK(got == mlp_oracle(f, p));
}

TEST_CASE("sftf_forward matches the oracle for deeper nets and thread counts") {
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    const SftfParams p = random_params({5, 7, 9, 13}, 3, act);
    const PointCloud c = random_cloud(150, 4);
    const DenseMatrix f = make_features(c, FeatureMode::kSpherical);
    const DenseMatrix want = mlp_oracle(f, p);
    for (int t : {1, 2, 5}) CHECK(sftf_forward(f, p, t) == want);
  }
}

TEST_CASE("sftf params validation") {
  CHECK_THROWS_AS(SftfParams(std::vector<DenseLayer>{}), Error);
  DenseLayer a{DenseMatrix(4, 5), std::vector<double>(4)};
  DenseLayer b{DenseMatrix(3, 3), std::vector<double>(3)};
  try {
    SftfParams({a, b});
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShapeMismatch);
  }
  DenseLayer bad{DenseMatrix(2, 5), std::vector<double>(2, std::nan(""))};
  CHECK_THROWS_AS(SftfParams({bad}), Error);
  const std::vector<std::size_t> ch{5, 32, 128, 64};
  CHECK(default_channels(5, 64) == ch);
  const SftfParams z = SftfParams::zeros(ch);
  CHECK(z.channels() == ch);
  CHECK(z.num_parameters() == 5 * 32 + 32 + 32 * 128 + 128 + 128 * 64 + 64);
  CHECK(z.num_areas() == 64);
}

TEST_CASE("random init stays within the fan-in bound") {
  const SftfParams p = random_params({5, 16, 8}, 1);
  for (const auto& layer : p.layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in()));
    for (double w : layer.weight.data()) CHECK(std::abs(w) <= bound);
    for (double b : layer.bias) CHECK(std::abs(b) <= bound);
  }
}

TEST_CASE("membership sigmoid stays strictly inside (0, 1)") {
  CHECK(membership_sigmoid(0.0) == 0.5);
  CHECK(membership_sigmoid(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  for (double x : {-1e6, -800.0, -40.0, 40.0, 800.0, 1e6}) {
    const double q = membership_sigmoid(x);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
    CHECK(std::isfinite(std::log(q)));
  }
  CHECK_THROWS_AS(MembershipMatrix(DenseMatrix(1, 1, 1.0)), Error);
  CHECK_THROWS_AS(membership(DenseMatrix(1, 1, std::nan(""))), Error);
}

TEST_CASE("group and sample indices follow descending membership with low-index ties") {
  SeededRng rng(2);
  DenseMatrix corr(40, 6);
  for (double& v : corr.data()) v = static_cast<double>(rng.below(5));   // many ties
  const MembershipMatrix q = membership(corr);
  const IndexTable g = group_indices(q, 7);
  const auto s = sample_indices(q);
  for (std::size_t j = 0; j < 6; ++j) {
    const auto want = top_n_oracle(q, j, 7);
    CHECK(std::vector<Index>(g.row(j).begin(), g.row(j).end()) == want);
    CHECK(s[j] == want.front());
  }
  CHECK(group_indices(q, 7, 3) == g);
  try {
    group_indices(q, 41);
    FAIL("expected GroupSizeTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGroupSizeTooLarge);
  }
}

TEST_CASE("fused structure equals the unfused composition") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const PointCloud c = random_cloud(64 + 37 * seed, seed);
    const FeatureMode mode = seed % 3 == 0 ? FeatureMode::kCartesian : FeatureMode::kSpherical;
    const SftfParams p = random_params(default_channels(feature_width(mode), 3 + seed * 7), 50 + seed,
                                       seed % 2 ? Activation::kTanh : Activation::kRelu);
    const MembershipMatrix q = membership(sftf_forward(make_features(c, mode), p));
    const std::size_t n = 1 + seed % 20;
    const StructuringResult want = make_result(c, sample_indices(q), group_indices(q, n));
    for (int t : {1, 2, 4}) CHECK(structure(c, p, n, {mode, t}) == want);
  }
}

TEST_CASE("saturated memberships still resolve ties by index") {
  const PointCloud c = random_cloud(30, 8);
  std::vector<DenseLayer> layers{{DenseMatrix(4, 5), std::vector<double>{1000, -1000, 0, 1000}}};
  const SftfParams p(layers);
  const StructuringResult r = structure(c, p, 5);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(r.sample_indices[j] == 0);
    CHECK(std::vector<Index>(r.groups.row(j).begin(), r.groups.row(j).end()) == std::vector<Index>{0, 1, 2, 3, 4});
  }
}

TEST_CASE("structure is invariant to input permutations") {
  const PointCloud c = random_cloud(200, 77);
  const SftfParams p = random_params(default_channels(5, 12), 78);
  const StructuringResult base = structure(c, p, 9);
  SeededRng rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Index> perm(c.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    const PointCloud pc = gather_points(c, perm);
    const StructuringResult r = structure(pc, p, 9);
    CHECK(r.sampled_xyz == base.sampled_xyz);
    for (std::size_t j = 0; j < 12; ++j) {
      std::set<Point3> a, b;
      for (Index i : base.groups.row(j)) a.insert(c[i]);
      for (Index i : r.groups.row(j)) b.insert(pc[i]);
      CHECK(a == b);
    }
  }
}

TEST_CASE("sample_and_group has the drop-in shape") {
  const PointCloud c = random_cloud(80, 9);
  const SftfParams p = random_params(default_channels(5, 10), 10);
  const SampleAndGroup sg = sample_and_group(c, p, 6, make_features(c, FeatureMode::kSpherical));
  CHECK(sg.sampled_xyz.rows() == 10);
  CHECK(sg.sampled_xyz.cols() == 3);
  CHECK(sg.grouped_xyz.dim0 == 10);
  CHECK(sg.grouped_xyz.dim1 == 6);
  CHECK(sg.grouped_xyz.dim2 == 3);
  REQUIRE(sg.grouped_features.has_value());
  CHECK(sg.grouped_features->dim2 == 5);
  CHECK_THROWS_AS(sample_and_group(c, p, 6, DenseMatrix(3, 2)), Error);
  CHECK_THROWS_AS(structure(c, p, 81), Error);
  const SftfParams wrong = random_params({3, 4}, 1);
  CHECK_THROWS_AS(structure(c, wrong, 2), Error);
}

TEST_CASE("2048 points into 512 areas runs end to end") {
  const PointCloud c = random_cloud(2048, 12);
  const SftfParams p = random_params(default_channels(5, 512), 13);
  const StructuringResult r = structure(c, p, 32);
  CHECK(r.num_samples() == 512);
  CHECK(r.group_size() == 32);
}
