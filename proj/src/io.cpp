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

#include "psnet/io.hpp"

#include <array>
#include <cctype>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "psnet/error.hpp"

namespace psnet::io {
namespace {

constexpr char kBinaryMagic[8] = {'P', 'S', 'N', 'E', 'T', 'v', '1', '\0'};
constexpr std::string_view kTextMagic = "PSNETv1 text";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool to_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

template <typename T>
bool to_unsigned(std::string_view tok, T& out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(path, mode);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  return f;
}

void finish(std::ostream& out, const std::string& what) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "failed while writing " + what);
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xFFu);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::kParseError, "truncated params file");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return v;
}

std::vector<DenseLayer> empty_layers(const std::vector<std::size_t>& channels) {
  if (channels.size() < 2) throw Error(ErrorCode::kParseError, "params file needs at least two channel widths");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < channels.size(); ++l) {
    if (channels[l] == 0 || channels[l + 1] == 0 || channels[l] > (1u << 24) || channels[l + 1] > (1u << 24))
      throw Error(ErrorCode::kParseError, "implausible channel width in params file");
    layers.push_back({DenseMatrix(channels[l + 1], channels[l]), std::vector<double>(channels[l + 1], 0.0)});
  }
  return layers;
}

}  // namespace

PointCloud parse_xyz(std::istream& in) {
  std::vector<Point3> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (toks.size() < 3) throw ParseError(lineno, "expected 3 coordinates, found " + std::to_string(toks.size()));
    Point3 p{};
    for (int k = 0; k < 3; ++k)
      if (!to_double(toks[k], p[k])) throw ParseError(lineno, "invalid number '" + std::string(toks[k]) + "'");
    pts.push_back(p);
  }
  return PointCloud(std::move(pts));
}

PointCloud load_xyz(const std::string& path) {
  auto f = open_in(path);
  return parse_xyz(f);
}

PlyCloud parse_ply(std::istream& in) {
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
  };
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next() || line != "ply") throw ParseError(1, "missing 'ply' magic");
  std::vector<Element> elements;
  bool format_seen = false;
  for (;;) {
    if (!next()) throw ParseError(lineno, "unterminated PLY header");
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "format") {
      if (toks.size() < 2) throw ParseError(lineno, "malformed format line");
      if (toks[1] != "ascii")
        throw Error(ErrorCode::kUnsupportedPly, "only ascii PLY is supported, got format '" + std::string(toks[1]) + "'");
      format_seen = true;
    } else if (toks[0] == "element") {
      Element e;
      if (toks.size() != 3 || !to_unsigned(toks[2], e.count)) throw ParseError(lineno, "malformed element line");
      e.name = toks[1];
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3) throw ParseError(lineno, "property outside an element");
      if (toks[1] == "list") {
        elements.back().properties.emplace_back("");   // lists are skipped wholesale
      } else {
        elements.back().properties.emplace_back(toks.back());
      }
    } else {
      throw ParseError(lineno, "unknown header keyword '" + std::string(toks[0]) + "'");
    }
  }
  if (!format_seen) throw ParseError(lineno, "PLY header lacks a format line");

  PlyCloud out{PointCloud({{0.0, 0.0, 0.0}}), std::nullopt};
  bool have_vertices = false;
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i)
        if (!next()) throw ParseError(lineno, "truncated element '" + e.name + "'");
      continue;
    }
    auto find = [&](std::string_view name) -> std::ptrdiff_t {
      for (std::size_t k = 0; k < e.properties.size(); ++k)
        if (e.properties[k] == name) return static_cast<std::ptrdiff_t>(k);
      return -1;
    };
    const std::ptrdiff_t ix = find("x"), iy = find("y"), iz = find("z");
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(lineno, "vertex element lacks x, y or z");
    const std::ptrdiff_t ir = find("red"), ig = find("green"), ib = find("blue");
    const bool colored = ir >= 0 && ig >= 0 && ib >= 0;
    std::vector<Point3> pts;
    std::vector<Rgb> colors;
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next()) throw ParseError(lineno + 1, "expected " + std::to_string(e.count) + " vertices");
      const auto toks = split_ws(line);
      if (toks.size() < e.properties.size()) throw ParseError(lineno, "too few vertex properties");
      Point3 p{};
      const std::ptrdiff_t idx[3] = {ix, iy, iz};
      for (int k = 0; k < 3; ++k)
        if (!to_double(toks[idx[k]], p[k])) throw ParseError(lineno, "invalid coordinate");
      pts.push_back(p);
      if (colored) {
        unsigned r = 0, g = 0, b = 0;
        if (!to_unsigned(toks[ir], r) || !to_unsigned(toks[ig], g) || !to_unsigned(toks[ib], b) || r > 255 ||
            g > 255 || b > 255)
          throw ParseError(lineno, "invalid color");
        colors.push_back({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)});
      }
    }
    out.cloud = PointCloud(std::move(pts));
    if (colored) out.colors = std::move(colors);
    have_vertices = true;
  }
  if (!have_vertices) throw Error(ErrorCode::kEmptyCloud, "PLY file has no vertex element");
  return out;
}

PlyCloud load_ply(const std::string& path) {
  auto f = open_in(path, std::ios::in | std::ios::binary);
  return parse_ply(f);
}

void write_ply(std::ostream& out, const PointCloud& cloud, std::span<const Rgb> colors) {
  if (!colors.empty() && colors.size() != cloud.size())
    throw Error(ErrorCode::kShapeMismatch, "color count does not match the vertex count");
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (!colors.empty()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud[i];
    out << format_double(p[0]) << ' ' << format_double(p[1]) << ' ' << format_double(p[2]);
    if (!colors.empty()) out << ' ' << unsigned{colors[i].r} << ' ' << unsigned{colors[i].g} << ' ' << unsigned{colors[i].b};
    out << '\n';
  }
}

void save_ply(const std::string& path, const PointCloud& cloud, std::span<const Rgb> colors) {
  auto f = open_out(path);
  write_ply(f, cloud, colors);
  finish(f, path);
}

std::vector<Rgb> visualization_colors(const StructuringResult& result, std::size_t m, std::optional<std::size_t> area) {
  if (area && *area >= result.num_samples()) throw Error(ErrorCode::kInvalidArgument, "area index out of range");
  std::vector<Rgb> colors(m, kOtherColor);
  const std::size_t lo = area ? *area : 0;
  const std::size_t hi = area ? *area + 1 : result.num_samples();
  for (std::size_t j = lo; j < hi; ++j)
    for (Index p : result.groups.row(j)) {
      if (p >= m) throw Error(ErrorCode::kShapeMismatch, "group index exceeds the cloud size");
      colors[p] = kGroupColor;
    }
  for (std::size_t j = lo; j < hi; ++j) {
    const Index p = result.sample_indices[j];
    if (p >= m) throw Error(ErrorCode::kShapeMismatch, "sample index exceeds the cloud size");
    colors[p] = kSampleColor;
  }
  return colors;
}

void write_params(std::ostream& out, const SftfParams& params, ParamsFormat format) {
  const auto channels = params.channels();
  const std::uint64_t act = params.activation() == Activation::kRelu ? 0 : 1;
  if (format == ParamsFormat::kBinary) {
    out.write(kBinaryMagic, sizeof kBinaryMagic);
    put_u64(out, act);
    put_u64(out, channels.size());
    for (std::size_t c : channels) put_u64(out, c);
    for (const auto& layer : params.layers()) {
      for (double w : layer.weight.data()) put_u64(out, std::bit_cast<std::uint64_t>(w));
      for (double b : layer.bias) put_u64(out, std::bit_cast<std::uint64_t>(b));
    }
    return;
  }
  out << kTextMagic << "\nactivation " << (act == 0 ? "relu" : "tanh") << "\nchannels";
  for (std::size_t c : channels) out << ' ' << c;
  out << '\n';
  for (const auto& layer : params.layers()) {
    for (std::size_t r = 0; r < layer.out(); ++r) {
      const auto row = layer.weight.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << format_double(row[k]);
      out << '\n';
    }
    for (std::size_t k = 0; k < layer.bias.size(); ++k) out << (k ? " " : "") << format_double(layer.bias[k]);
    out << '\n';
  }
}

SftfParams read_params(std::istream& in) {
  char head[8] = {};
  if (!in.read(head, 8)) throw Error(ErrorCode::kParseError, "params file too short");
  if (std::memcmp(head, kBinaryMagic, 8) == 0) {
    const std::uint64_t act = get_u64(in);
    if (act > 1) throw Error(ErrorCode::kParseError, "unknown activation code in params file");
    const std::uint64_t count = get_u64(in);
    if (count < 2 || count > 64) throw Error(ErrorCode::kParseError, "implausible layer count in params file");
    std::vector<std::size_t> channels(count);
    for (auto& c : channels) c = static_cast<std::size_t>(get_u64(in));
    auto layers = empty_layers(channels);
    for (auto& layer : layers) {
      for (double& w : layer.weight.data()) w = std::bit_cast<double>(get_u64(in));
      for (double& b : layer.bias) b = std::bit_cast<double>(get_u64(in));
    }
    return SftfParams(std::move(layers), act == 0 ? Activation::kRelu : Activation::kTanh);
  }
  std::string first(head, 8);
  std::string rest;
  std::getline(in, rest);
  first += rest;
  if (first != kTextMagic) throw Error(ErrorCode::kParseError, "missing PSNETv1 magic");
  std::size_t lineno = 1;
  std::string line;
  auto next_tokens = [&]() {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "truncated params file");
    ++lineno;
    return split_ws(line);
  };
  auto toks = next_tokens();
  if (toks.size() != 2 || toks[0] != "activation" || (toks[1] != "relu" && toks[1] != "tanh"))
    throw ParseError(lineno, "expected 'activation relu|tanh'");
  const Activation activation = toks[1] == "relu" ? Activation::kRelu : Activation::kTanh;
  toks = next_tokens();
  if (toks.size() < 3 || toks[0] != "channels") throw ParseError(lineno, "expected a channel list");
  std::vector<std::size_t> channels;
  for (std::size_t k = 1; k < toks.size(); ++k) {
    std::size_t c = 0;
    if (!to_unsigned(toks[k], c)) throw ParseError(lineno, "invalid channel width");
    channels.push_back(c);
  }
  auto layers = empty_layers(channels);
  auto read_row = [&](std::span<double> dst) {
    const auto vals = next_tokens();
    if (vals.size() != dst.size())
      throw ParseError(lineno, "expected " + std::to_string(dst.size()) + " values, found " + std::to_string(vals.size()));
    for (std::size_t k = 0; k < dst.size(); ++k)
      if (!to_double(vals[k], dst[k])) throw ParseError(lineno, "invalid number '" + std::string(vals[k]) + "'");
  };
  for (auto& layer : layers) {
    for (std::size_t r = 0; r < layer.out(); ++r) read_row(layer.weight.row(r));
    read_row(layer.bias);
  }
  return SftfParams(std::move(layers), activation);
}

void save_params(const std::string& path, const SftfParams& params, ParamsFormat format) {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  write_params(f, params, format);
  finish(f, path);
}

SftfParams load_params(const std::string& path) {
  auto f = open_in(path, std::ios::in | std::ios::binary);
  return read_params(f);
}

std::string result_to_json(const StructuringResult& result) {
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t j = 0; j < result.groups.rows(); ++j) {
    const auto row = result.groups.row(j);
    groups.push_back(std::vector<Index>(row.begin(), row.end()));
  }
  nlohmann::json sampled = nlohmann::json::array();
  for (std::size_t j = 0; j < result.sampled_xyz.rows(); ++j) {
    const auto row = result.sampled_xyz.row(j);
    sampled.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json doc = {{"s", result.num_samples()},
                        {"n", result.group_size()},
                        {"sample_indices", result.sample_indices},
                        {"groups", groups},
                        {"sampled_xyz", sampled}};
  return doc.dump(2);
}

void write_text(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
  finish(f, path);
}

}  // namespace psnet::io
