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

#ifndef PSNET_FEATURES_HPP_
#define PSNET_FEATURES_HPP_

#include <string_view>

#include "psnet/core.hpp"

namespace psnet {

/// Per-point input features fed to the pointwise transform.
enum class FeatureMode {
  kCartesian,   // [x, y, z]
  kSpherical,   // [x, y, z, theta, phi]
  kAnglesOnly,  // [r, theta, phi]
};

std::size_t feature_width(FeatureMode mode);
std::string_view feature_mode_name(FeatureMode mode);
/// Accepts the canonical names above plus "cartesian"/"3", "spherical"/"5"
/// and "angles".
FeatureMode parse_feature_mode(std::string_view name);

/// Polar and azimuthal angle of one point.
/// theta = arccos(z / r) in [0, pi], phi = atan2(y, x) + pi in [0, 2 pi].
/// The origin maps to theta = 0, phi = pi.
struct Angles {
  double r;
  double theta;
  double phi;
};
Angles spherical_angles(const Point3& p);

/// m x 5 matrix [x, y, z, theta, phi]. Columns 0-2 copy the cloud exactly.
DenseMatrix spherical_augment(const PointCloud& cloud);

/// m x 3 copy of the coordinates.
DenseMatrix cartesian_only(const PointCloud& cloud);

/// m x 3 matrix [r, theta, phi].
DenseMatrix angles_only(const PointCloud& cloud);

DenseMatrix make_features(const PointCloud& cloud, FeatureMode mode);

}  // namespace psnet

#endif  // PSNET_FEATURES_HPP_
