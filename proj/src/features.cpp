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

#include "psnet/features.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace psnet {

std::size_t feature_width(FeatureMode mode) { return mode == FeatureMode::kSpherical ? 5 : 3; }

std::string_view feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kCartesian: return "xyz";
    case FeatureMode::kSpherical: return "xyz_theta_phi";
    case FeatureMode::kAnglesOnly: return "r_theta_phi";
  }
  return "unknown";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "xyz" || name == "cartesian" || name == "3") return FeatureMode::kCartesian;
  if (name == "xyz_theta_phi" || name == "spherical" || name == "5") return FeatureMode::kSpherical;
  if (name == "r_theta_phi" || name == "angles") return FeatureMode::kAnglesOnly;
  throw Error(ErrorCode::kInvalidArgument, "unknown feature mode '" + std::string(name) + "'");
}

Angles spherical_angles(const Point3& p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  if (r == 0.0) return {0.0, 0.0, std::numbers::pi};
  // z / r can leave [-1, 1] by an ulp when x and y underflow against z.
  const double c = std::fmax(-1.0, std::fmin(1.0, p[2] / r));
  return {r, std::acos(c), std::atan2(p[1], p[0]) + std::numbers::pi};
}

DenseMatrix spherical_augment(const PointCloud& cloud) {
  DenseMatrix out(cloud.size(), 5);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud[i];
    const Angles a = spherical_angles(p);
    auto row = out.row(i);
    row[0] = p[0];
    row[1] = p[1];
    row[2] = p[2];
    row[3] = a.theta;
    row[4] = a.phi;
  }
  return out;
}

DenseMatrix cartesian_only(const PointCloud& cloud) { return coordinates(cloud); }

DenseMatrix angles_only(const PointCloud& cloud) {
  DenseMatrix out(cloud.size(), 3);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Angles a = spherical_angles(cloud[i]);
    out(i, 0) = a.r;
    out(i, 1) = a.theta;
    out(i, 2) = a.phi;
  }
  return out;
}

DenseMatrix make_features(const PointCloud& cloud, FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kCartesian: return cartesian_only(cloud);
    case FeatureMode::kSpherical: return spherical_augment(cloud);
    case FeatureMode::kAnglesOnly: return angles_only(cloud);
  }
  return cartesian_only(cloud);
}

}  // namespace psnet
