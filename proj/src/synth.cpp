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

#include "psnet/synth.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

namespace psnet::synth {
namespace {

constexpr double kPi = std::numbers::pi;

Point3 unit_vector(SeededRng& rng) {
  for (;;) {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1e-12) return {x / r, y / r, z / r};
  }
}

/// Picks an index with probability proportional to weights[i].
std::size_t pick_weighted(std::span<const double> weights, SeededRng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

Point3 on_disk(double radius, double z, SeededRng& rng) {
  const double rr = radius * std::sqrt(rng.uniform());
  const double a = rng.uniform(0.0, 2.0 * kPi);
  return {rr * std::cos(a), rr * std::sin(a), z};
}

Point3 on_cylinder_side(double radius, double z0, double z1, SeededRng& rng) {
  const double a = rng.uniform(0.0, 2.0 * kPi);
  return {radius * std::cos(a), radius * std::sin(a), rng.uniform(z0, z1)};
}

/// Surface of revolution with radius profile r(z) = r0 + slope * (z - z0),
/// z in [z0, z1]; area-weighted along z (slant factor is constant).
Point3 on_frustum(double r0, double slope, double z0, double z1, SeededRng& rng) {
  const double r1 = r0 + slope * (z1 - z0);
  double z;
  if (std::abs(r1 - r0) < 1e-12) {
    z = rng.uniform(z0, z1);
  } else {
    // Inverse CDF of density proportional to r(z).
    const double u = rng.uniform();
    const double r = std::sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0));
    z = z0 + (r - r0) / slope;
  }
  const double r = r0 + slope * (z - z0);
  const double a = rng.uniform(0.0, 2.0 * kPi);
  return {r * std::cos(a), r * std::sin(a), z};
}

double frustum_area(double r0, double r1, double height) {
  return kPi * (r0 + r1) * std::sqrt(height * height + (r1 - r0) * (r1 - r0));
}

std::vector<Point3> sample_box(std::size_t m, SeededRng& rng) {
  const double hx = rng.uniform(0.4, 0.75), hy = rng.uniform(0.4, 0.75), hz = rng.uniform(0.4, 0.75);
  const double areas[3] = {hy * hz, hx * hz, hx * hy};
  std::vector<Point3> out(m);
  for (auto& p : out) {
    const std::size_t axis = pick_weighted(areas, rng);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Point3 q = {rng.uniform(-hx, hx), rng.uniform(-hy, hy), rng.uniform(-hz, hz)};
    const double h[3] = {hx, hy, hz};
    q[axis] = sign * h[axis];
    p = q;
  }
  return out;
}

std::vector<Point3> sample_cylinder(std::size_t m, SeededRng& rng) {
  const double r = rng.uniform(0.4, 0.6), h = rng.uniform(0.6, 0.9);
  const double areas[2] = {2.0 * kPi * r * 2.0 * h, 2.0 * kPi * r * r};
  std::vector<Point3> out(m);
  for (auto& p : out) {
    if (pick_weighted(areas, rng) == 0)
      p = on_cylinder_side(r, -h, h, rng);
    else
      p = on_disk(r, rng.uniform() < 0.5 ? -h : h, rng);
  }
  return out;
}

std::vector<Point3> sample_torus(std::size_t m, SeededRng& rng) {
  const double big = rng.uniform(0.6, 0.75), tube = rng.uniform(0.18, 0.3);
  std::vector<Point3> out(m);
  for (auto& p : out) {
    for (;;) {
      const double u = rng.uniform(0.0, 2.0 * kPi);
      const double v = rng.uniform(0.0, 2.0 * kPi);
      // Area element is proportional to big + tube * cos(v).
      if (rng.uniform() * (big + tube) > big + tube * std::cos(v)) continue;
      const double ring = big + tube * std::cos(v);
      p = {ring * std::cos(u), ring * std::sin(u), tube * std::sin(v)};
      break;
    }
  }
  return out;
}

std::vector<Point3> sample_cone(std::size_t m, SeededRng& rng) {
  const double r = rng.uniform(0.5, 0.7), half = rng.uniform(0.6, 0.8);
  const double areas[2] = {frustum_area(r, 0.0, 2.0 * half), kPi * r * r};
  std::vector<Point3> out(m);
  for (auto& p : out) {
    if (pick_weighted(areas, rng) == 0)
      p = on_frustum(r, -r / (2.0 * half), -half, half, rng);
    else
      p = on_disk(r, -half, rng);
  }
  return out;
}

std::vector<Point3> sample_ellipsoid(std::size_t m, SeededRng& rng) {
  const double a = rng.uniform(0.5, 1.0), b = rng.uniform(0.5, 1.0), c = rng.uniform(0.3, 0.6);
  std::vector<Point3> out(m);
  for (auto& p : out) {
    const Point3 u = unit_vector(rng);
    p = {a * u[0], b * u[1], c * u[2]};
  }
  return out;
}

std::vector<Point3> sample_dumbbell(std::size_t m, SeededRng& rng) {
  const double ball = rng.uniform(0.28, 0.38), offset = rng.uniform(0.55, 0.7), bar = 0.08;
  const double bar_half = offset - ball;
  const double areas[2] = {2.0 * 4.0 * kPi * ball * ball, 2.0 * kPi * bar * 2.0 * bar_half};
  std::vector<Point3> out(m);
  for (auto& p : out) {
    if (pick_weighted(areas, rng) == 0) {
      const Point3 u = unit_vector(rng);
      const double cz = rng.uniform() < 0.5 ? -offset : offset;
      p = {ball * u[0], ball * u[1], cz + ball * u[2]};
    } else {
      p = on_cylinder_side(bar, -bar_half, bar_half, rng);
    }
  }
  return out;
}

std::vector<Point3> sample_hourglass(std::size_t m, SeededRng& rng) {
  const double waist = rng.uniform(0.08, 0.15), rim = rng.uniform(0.5, 0.7), half = rng.uniform(0.6, 0.8);
  const double slope = (rim - waist) / half;
  std::vector<Point3> out(m);
  for (auto& p : out) {
    p = on_frustum(waist, slope, 0.0, half, rng);
    if (rng.uniform() < 0.5) p[2] = -p[2];
  }
  return out;
}

std::vector<Point3> sample_sandwich(std::size_t m, SeededRng& rng) {
  const double hx = rng.uniform(0.5, 0.8), hy = rng.uniform(0.5, 0.8), gap = rng.uniform(0.35, 0.6);
  std::vector<Point3> out(m);
  for (auto& p : out) {
    const double z = rng.uniform() < 0.5 ? -gap : gap;
    p = {rng.uniform(-hx, hx), rng.uniform(-hy, hy), z};
  }
  return out;
}

std::vector<Point3> sample_bicone(std::size_t m, SeededRng& rng) {
  const double r = rng.uniform(0.5, 0.75), half = rng.uniform(0.6, 0.85);
  std::vector<Point3> out(m);
  for (auto& p : out) {
    p = on_frustum(r, -r / half, 0.0, half, rng);
    if (rng.uniform() < 0.5) p[2] = -p[2];
  }
  return out;
}

}  // namespace

std::string_view family_name(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::kSphere: return "sphere";
    case ShapeFamily::kBox: return "box";
    case ShapeFamily::kCylinder: return "cylinder";
    case ShapeFamily::kTorus: return "torus";
    case ShapeFamily::kCone: return "cone";
    case ShapeFamily::kEllipsoid: return "ellipsoid";
    case ShapeFamily::kDumbbell: return "dumbbell";
    case ShapeFamily::kHourglass: return "hourglass";
    case ShapeFamily::kSandwich: return "sandwich";
    case ShapeFamily::kBicone: return "bicone";
  }
  return "unknown";
}

bool is_mirror_symmetric(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::kDumbbell:
    case ShapeFamily::kHourglass:
    case ShapeFamily::kSandwich:
    case ShapeFamily::kBicone:
      return true;
    default:
      return false;
  }
}

std::vector<Point3> sample_surface(ShapeFamily family, std::size_t m, SeededRng& rng) {
  switch (family) {
    case ShapeFamily::kSphere: {
      std::vector<Point3> out(m);
      for (auto& p : out) p = unit_vector(rng);
      return out;
    }
    case ShapeFamily::kBox: return sample_box(m, rng);
    case ShapeFamily::kCylinder: return sample_cylinder(m, rng);
    case ShapeFamily::kTorus: return sample_torus(m, rng);
    case ShapeFamily::kCone: return sample_cone(m, rng);
    case ShapeFamily::kEllipsoid: return sample_ellipsoid(m, rng);
    case ShapeFamily::kDumbbell: return sample_dumbbell(m, rng);
    case ShapeFamily::kHourglass: return sample_hourglass(m, rng);
    case ShapeFamily::kSandwich: return sample_sandwich(m, rng);
    case ShapeFamily::kBicone: return sample_bicone(m, rng);
  }
  return {};
}

std::vector<Point3> augment(std::vector<Point3> points, const Augmentation& aug, SeededRng& rng) {
  const double scale = rng.uniform(aug.scale_low, aug.scale_high);
  const double angle = aug.rotate ? rng.uniform(0.0, 2.0 * kPi) : 0.0;
  const double c = std::cos(angle), s = std::sin(angle);
  const Point3 shift = {rng.uniform(-aug.translation, aug.translation), rng.uniform(-aug.translation, aug.translation),
                        rng.uniform(-aug.translation, aug.translation)};
  for (auto& p : points) {
    const double x = scale * p[0], y = scale * p[1], z = scale * p[2];
    p = {c * x - s * y + shift[0], s * x + c * y + shift[1], z + shift[2]};
    if (aug.jitter > 0.0)
      for (double& v : p) v += aug.jitter * rng.normal();
  }
  return points;
}

std::vector<ShapeFamily> general_families(std::size_t classes) {
  static const ShapeFamily kAll[] = {ShapeFamily::kSphere, ShapeFamily::kBox,  ShapeFamily::kCylinder,
                                     ShapeFamily::kTorus,  ShapeFamily::kCone, ShapeFamily::kEllipsoid};
  if (classes < 2 || classes > std::size(kAll))
    throw Error(ErrorCode::kInvalidArgument, "general shape classes must be in [2, 6]");
  return {kAll, kAll + classes};
}

std::vector<ShapeFamily> symmetric_families(std::size_t classes) {
  static const ShapeFamily kAll[] = {ShapeFamily::kDumbbell, ShapeFamily::kHourglass, ShapeFamily::kSandwich,
                                     ShapeFamily::kBicone};
  if (classes < 2 || classes > std::size(kAll))
    throw Error(ErrorCode::kInvalidArgument, "symmetric shape classes must be in [2, 4]");
  return {kAll, kAll + classes};
}

Dataset make_dataset(const DatasetConfig& cfg, std::uint64_t seed) {
  if (cfg.families.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two classes");
  if (cfg.points == 0) throw Error(ErrorCode::kInvalidArgument, "shapes need at least one point");
  const SeededRng root(seed);
  Dataset ds;
  std::uint64_t stream = 0;
  auto make = [&](std::size_t label) {
    SeededRng rng = root.child(stream++);
    auto pts = augment(sample_surface(cfg.families[label], cfg.points, rng), cfg.augmentation, rng);
    return LabeledCloud{PointCloud(std::move(pts)), label, cfg.families[label]};
  };
  // Interleave classes so a prefix of either split is class balanced.
  for (std::size_t k = 0; k < cfg.train_per_class; ++k)
    for (std::size_t c = 0; c < cfg.families.size(); ++c) ds.train.push_back(make(c));
  for (std::size_t k = 0; k < cfg.test_per_class; ++k)
    for (std::size_t c = 0; c < cfg.families.size(); ++c) ds.test.push_back(make(c));
  return ds;
}

}  // namespace psnet::synth
