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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "psnet/baselines.hpp"
#include "psnet/error.hpp"
#include "psnet/io.hpp"

using namespace psnet;
using namespace psnet::io;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("psnet_test_" + name)).string();
}

SftfParams random_params(std::vector<std::size_t> ch, std::uint64_t seed, Activation act = Activation::kRelu) {
  SeededRng rng(seed);
  return SftfParams::random(ch, rng, act);
}

}  // namespace

TEST_CASE("xyz parsing") {
  std::istringstream two("0 0 0\n1 1 1\n");
  CHECK(parse_xyz(two).size() == 2);
  std::istringstream comment("# header\n1 2 3\n");
  const PointCloud c = parse_xyz(comment);
  CHECK(c.size() == 1);
  CHECK(c[0][2] == 3.0);
  std::istringstream extra("1 2 3 0.5 0.5\n\n  4 5 6\n");
  CHECK(parse_xyz(extra).size() == 2);
  std::istringstream bad("1 2\n");
  try {
    parse_xyz(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.code() == ErrorCode::kParseError);
  }
  std::istringstream word("0 0 0\n1 x 2\n");
  try {
    parse_xyz(word);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_xyz(empty), Error);
  CHECK_THROWS_AS(load_xyz(temp_path("does_not_exist.xyz")), Error);
}

TEST_CASE("ply round trip keeps coordinates bit for bit") {
  const PointCloud c({{0.1, -2.5, 3.0}, {1e-17, 4.0 / 3.0, -0.0}, {1, 2, 3}});
  const std::string path = temp_path("rt.ply");
  save_ply(path, c);
  const PlyCloud back = load_ply(path);
  CHECK(back.cloud == c);
  CHECK_FALSE(back.colors.has_value());
  std::remove(path.c_str());
}

TEST_CASE("ply with colors and extra elements") {
  std::istringstream in(
      "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float x\nproperty float y\n"
      "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nelement face 1\n"
      "property list uchar int vertex_indices\nend_header\n0 0 0 255 0 0\n1 1 1 0 255 0\n3 0 1 1\n");
  const PlyCloud p = parse_ply(in);
  CHECK(p.cloud.size() == 2);
  REQUIRE(p.colors.has_value());
  CHECK((*p.colors)[1] == kSampleColor);
}

TEST_CASE("binary and malformed ply are rejected") {
  std::istringstream bin("ply\nformat binary_little_endian 1.0\nelement vertex 1\nend_header\n");
  try {
    parse_ply(bin);
    FAIL("expected UnsupportedPly");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedPly);
    CHECK(std::string(e.what()).find("ascii") != std::string::npos);
  }
  std::istringstream short_body(
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nend_header\n"
      "0 0 0\n");
  CHECK_THROWS_AS(parse_ply(short_body), ParseError);
  std::istringstream no_magic("plx\n");
  CHECK_THROWS_AS(parse_ply(no_magic), ParseError);
}

TEST_CASE("visualization export colors samples green and members red") {
  SeededRng rng(1);
  std::vector<Point3> pts(50);
  for (auto& p : pts) p = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  const PointCloud c(pts);
  const StructuringResult r = baselines::fps_knn_pipeline(c, 4, 5);
  const auto colors = visualization_colors(r, c.size());
  for (Index s : r.sample_indices) CHECK(colors[s] == kSampleColor);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t t = 1; t < 5; ++t) CHECK(colors[r.groups(j, t)] != kOtherColor);
  const auto one = visualization_colors(r, c.size(), 2);
  CHECK(one[r.sample_indices[2]] == kSampleColor);
  CHECK(one[r.sample_indices[0]] != kSampleColor);

  std::ostringstream out;
  write_ply(out, c, colors);
  const std::string text = out.str();
  CHECK(text.find("element vertex 50\n") != std::string::npos);
  std::istringstream back(text);
  const PlyCloud p = parse_ply(back);
  CHECK(p.cloud.size() == 50);
  CHECK(*p.colors == colors);
  CHECK_THROWS_AS(write_ply(out, c, std::vector<Rgb>(3)), Error);
}

TEST_CASE("params round trip bit-exactly in both formats") {
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    const SftfParams p = random_params({5, 32, 128, 17}, 3, act);
    for (ParamsFormat fmt : {ParamsFormat::kBinary, ParamsFormat::kText}) {
      std::stringstream buf;
      write_params(buf, p, fmt);
      CHECK(read_params(buf) == p);
    }
  }
  const std::string path = temp_path("w.psnet");
  const SftfParams p = random_params({3, 4}, 4);
  save_params(path, p);
  CHECK(load_params(path) == p);
  std::ifstream raw(path, std::ios::binary);
  char magic[8];
  raw.read(magic, 8);
  CHECK(std::string(magic, 7) == "PSNETv1");
  std::remove(path.c_str());
}

TEST_CASE("binary params are little-endian doubles") {
  const SftfParams p({DenseLayer{DenseMatrix(1, 1, 1.0), {-2.0}}});
  std::stringstream buf;
  write_params(buf, p);
  const std::string bytes = buf.str();
  // magic(8) activation(8) count(8) channels(16) weight(8) bias(8)
  REQUIRE(bytes.size() == 56);
  CHECK(static_cast<unsigned char>(bytes[40 + 7]) == 0x3F);   // 1.0 = 0x3FF0...
  CHECK(static_cast<unsigned char>(bytes[40 + 6]) == 0xF0);
  CHECK(static_cast<unsigned char>(bytes[48 + 7]) == 0xC0);   // -2.0 = 0xC000...
}

TEST_CASE("corrupt params files are rejected") {
  std::stringstream junk("NOTPSNET....");
  CHECK_THROWS_AS(read_params(junk), Error);
  std::stringstream truncated;
  write_params(truncated, random_params({5, 3}, 1));
  std::string s = truncated.str();
  s.resize(s.size() - 4);
  std::stringstream cut(s);
  CHECK_THROWS_AS(read_params(cut), Error);
  std::stringstream text("PSNETv1 text\nactivation relu\nchannels 2 1\n1 2 3\n0\n");
  CHECK_THROWS_AS(read_params(text), ParseError);
}

TEST_CASE("structuring result json schema") {
  const PointCloud c({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}});
  const StructuringResult r = baselines::fps_knn_pipeline(c, 2, 2);
  const auto doc = nlohmann::json::parse(result_to_json(r));
  CHECK(doc["s"] == 2);
  CHECK(doc["n"] == 2);
  CHECK(doc["sample_indices"].size() == 2);
  CHECK(doc["groups"].size() == 2);
  CHECK(doc["groups"][0].size() == 2);
  CHECK(doc["sampled_xyz"][1].size() == 3);
}
