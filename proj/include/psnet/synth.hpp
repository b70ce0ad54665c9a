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

#ifndef PSNET_SYNTH_HPP_
#define PSNET_SYNTH_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "psnet/core.hpp"
#include "psnet/rng.hpp"

// Parametric surface samplers standing in for a real shape dataset.
namespace psnet::synth {

enum class ShapeFamily {
  // General families, randomly rotated about the vertical axis.
  kSphere,
  kBox,
  kCylinder,
  kTorus,
  kCone,
  kEllipsoid,
  // Mirror-symmetric about z = 0, kept axis aligned.
  kDumbbell,
  kHourglass,
  kSandwich,
  kBicone,
};

std::string_view family_name(ShapeFamily family);
bool is_mirror_symmetric(ShapeFamily family);

/// m points on the canonical (unaugmented) surface, roughly unit sized.
/// The sphere is exactly the unit sphere.
std::vector<Point3> sample_surface(ShapeFamily family, std::size_t m, SeededRng& rng);

struct Augmentation {
  double jitter = 0.01;         // stddev of per-point Gaussian noise
  double scale_low = 0.8;
  double scale_high = 1.25;
  double translation = 0.05;    // max absolute shift per axis
  bool rotate = true;           // random rotation about z
};

/// Scale, rotate, translate, then jitter (in that order).
std::vector<Point3> augment(std::vector<Point3> points, const Augmentation& aug, SeededRng& rng);

struct LabeledCloud {
  PointCloud cloud;
  std::size_t label;
  ShapeFamily family;
};

struct DatasetConfig {
  std::vector<ShapeFamily> families;   // class c is families[c]
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  std::size_t points = 256;
  Augmentation augmentation;
};

struct Dataset {
  std::vector<LabeledCloud> train;
  std::vector<LabeledCloud> test;
};

/// The first `classes` general families (sphere, box, cylinder, torus, ...).
std::vector<ShapeFamily> general_families(std::size_t classes);
/// The first `classes` mirror-symmetric families.
std::vector<ShapeFamily> symmetric_families(std::size_t classes);

/// Deterministic per seed: each shape draws from its own child stream.
Dataset make_dataset(const DatasetConfig& cfg, std::uint64_t seed);

}  // namespace psnet::synth

#endif  // PSNET_SYNTH_HPP_
