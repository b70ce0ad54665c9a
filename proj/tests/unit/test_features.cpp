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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "psnet/error.hpp"
#include "psnet/features.hpp"

using namespace psnet;
constexpr double kPi = std::numbers::pi;

TEST_CASE("spherical angles of axis points") {
  CHECK(spherical_angles({0, 0, 1}).theta == 0.0);
  CHECK(spherical_angles({0, 0, -1}).theta == doctest::Approx(kPi));
  CHECK(spherical_angles({1, 0, 0}).theta == doctest::Approx(kPi / 2));
  CHECK(spherical_angles({1, 0, 0}).phi == doctest::Approx(kPi));
  CHECK(spherical_angles({0, 1, 0}).phi == doctest::Approx(1.5 * kPi));
  CHECK(spherical_angles({0, -1, 0}).phi == doctest::Approx(0.5 * kPi));
  CHECK(spherical_angles({-1, 0, 0}).phi == doctest::Approx(2 * kPi));
  CHECK(spherical_angles({3, 4, 0}).r == 5.0);
}

TEST_CASE("origin maps to theta 0, phi pi") {
  const Angles a = spherical_angles({0, 0, 0});
  CHECK(a.r == 0.0);
  CHECK(a.theta == 0.0);
  CHECK(a.phi == kPi);
}

TEST_CASE("angles stay inside their closed ranges") {
  const double vals[] = {-2.0, -1e-300, 0.0, 1e-300, 0.5, 3.0};
  for (double x : vals)
    for (double y : vals)
      for (double z : vals) {
        const Angles a = spherical_angles({x, y, z});
        CHECK(a.theta >= 0.0);
        CHECK(a.theta <= kPi);
        CHECK(a.phi >= 0.0);
        CHECK(a.phi <= 2 * kPi);
      }
}

TEST_CASE("mirror images receive different angles") {
  const double a = 0.3, b = -0.7, c = 0.4;
  CHECK(spherical_angles({a, b, c}).theta != spherical_angles({a, b, -c}).theta);
  CHECK(spherical_angles({a, b, c}).phi != spherical_angles({-a, b, c}).phi);
}

TEST_CASE("spherical augment copies coordinates exactly") {
  const PointCloud c({{0.1, 0.2, 0.3}, {-1, 2, -3}});
  const DenseMatrix f = spherical_augment(c);
  REQUIRE(f.cols() == 5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int k = 0; k < 3; ++k) CHECK(f(i, k) == c[i][k]);
    const double r = std::sqrt(c[i][0] * c[i][0] + c[i][1] * c[i][1] + c[i][2] * c[i][2]);
    CHECK(f(i, 3) == doctest::Approx(std::acos(c[i][2] / r)));
    CHECK(f(i, 4) == doctest::Approx(std::atan2(c[i][1], c[i][0]) + kPi));
  }
}

TEST_CASE("feature modes and widths") {
  const PointCloud c({{1, 0, 0}});
  CHECK(make_features(c, FeatureMode::kCartesian).cols() == 3);
  CHECK(make_features(c, FeatureMode::kSpherical).cols() == 5);
  const DenseMatrix a = make_features(c, FeatureMode::kAnglesOnly);
  CHECK(a.cols() == 3);
  CHECK(a(0, 0) == 1.0);
  CHECK(a(0, 1) == doctest::Approx(kPi / 2));
  CHECK(feature_width(FeatureMode::kSpherical) == 5);
  for (FeatureMode m : {FeatureMode::kCartesian, FeatureMode::kSpherical, FeatureMode::kAnglesOnly})
    CHECK(parse_feature_mode(feature_mode_name(m)) == m);
  CHECK_THROWS_AS(parse_feature_mode("quaternion"), Error);
}
