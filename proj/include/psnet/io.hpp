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

#ifndef PSNET_IO_HPP_
#define PSNET_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psnet/core.hpp"
#include "psnet/psnet.hpp"
#include "psnet/structuring.hpp"

namespace psnet::io {

/// Whitespace separated "x y z" lines; extra columns are ignored, blank lines
/// and lines starting with '#' are skipped. Throws ParseError (with the line
/// number) on malformed lines and EmptyCloud when no point is read.
PointCloud parse_xyz(std::istream& in);
PointCloud load_xyz(const std::string& path);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kGroupColor{255, 0, 0};
inline constexpr Rgb kSampleColor{0, 255, 0};
inline constexpr Rgb kOtherColor{128, 128, 128};

struct PlyCloud {
  PointCloud cloud;
  std::optional<std::vector<Rgb>> colors;
};

/// ascii PLY with a vertex element holding x, y, z (and optionally red,
/// green, blue). Binary encodings raise UnsupportedPly.
PlyCloud parse_ply(std::istream& in);
PlyCloud load_ply(const std::string& path);

void write_ply(std::ostream& out, const PointCloud& cloud, std::span<const Rgb> colors = {});
void save_ply(const std::string& path, const PointCloud& cloud, std::span<const Rgb> colors = {});

/// Gray for every point, red for group members, green for sampling points.
/// With `area` set only that area's members and sample are highlighted.
std::vector<Rgb> visualization_colors(const StructuringResult& result, std::size_t m,
                                      std::optional<std::size_t> area = std::nullopt);

enum class ParamsFormat { kBinary, kText };

/// "PSNETv1" header, activation, channel list, then each layer's row-major
/// weights followed by its bias. Binary values are little-endian IEEE
/// doubles; text values are shortest round-trip decimals. Loading detects the
/// format and reproduces the parameters bit for bit.
void write_params(std::ostream& out, const SftfParams& params, ParamsFormat format = ParamsFormat::kBinary);
SftfParams read_params(std::istream& in);
void save_params(const std::string& path, const SftfParams& params, ParamsFormat format = ParamsFormat::kBinary);
SftfParams load_params(const std::string& path);

/// {"s", "n", "sample_indices", "groups", "sampled_xyz"}.
std::string result_to_json(const StructuringResult& result);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace psnet::io

#endif  // PSNET_IO_HPP_
