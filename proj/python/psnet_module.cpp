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

// Python bindings. Arrays cross the boundary as float64 / int64 numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "psnet/baselines.hpp"
#include "psnet/bench.hpp"
#include "psnet/error.hpp"
#include "psnet/features.hpp"
#include "psnet/io.hpp"
#include "psnet/psnet.hpp"
#include "psnet/rng.hpp"

namespace py = pybind11;
using namespace psnet;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using I64 = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

PointCloud to_cloud(const F64& a) {
  if (a.ndim() != 2 || a.shape(1) != 3)
    throw Error(ErrorCode::kShapeMismatch, "points must have shape (m, 3)");
  std::vector<Point3> pts(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[i] = {r(i, 0), r(i, 1), r(i, 2)};
  return validate_cloud(std::move(pts));
}

DenseMatrix to_matrix(const F64& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kShapeMismatch, "expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<Index> to_indices(const I64& a, std::size_t m) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (py::ssize_t i = 0; i < a.size(); ++i) {
    const auto v = a.data()[i];
    if (v < 0 || static_cast<std::size_t>(v) >= m) throw Error(ErrorCode::kInvalidArgument, "index out of range");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

F64 from_matrix(const DenseMatrix& m) {
  F64 out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

F64 from_tensor(const Tensor3& t) {
  F64 out({t.dim0, t.dim1, t.dim2});
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

I64 from_indices(std::span<const Index> v) {
  I64 out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

I64 from_table(const IndexTable& t) {
  I64 out({t.rows(), t.cols()});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::dict result_dict(const StructuringResult& r) {
  py::dict d;
  d["sample_indices"] = from_indices(r.sample_indices);
  d["groups"] = from_table(r.groups);
  d["sampled_xyz"] = from_matrix(r.sampled_xyz);
  d["grouped_xyz"] = from_tensor(r.grouped_xyz);
  return d;
}

py::tuple sg_tuple(const SampleAndGroup& sg) {
  py::object feats = py::none();
  if (sg.grouped_features) feats = from_tensor(*sg.grouped_features);
  return py::make_tuple(from_matrix(sg.sampled_xyz), from_tensor(sg.grouped_xyz), feats);
}

std::optional<DenseMatrix> optional_matrix(const std::optional<F64>& a) {
  if (!a) return std::nullopt;
  return to_matrix(*a);
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw Error(ErrorCode::kInvalidArgument, "unknown activation: " + name);
}

}  // namespace

PYBIND11_MODULE(_psnet, m) {
  m.doc() = "Learned point sampling and grouping";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(std::string(error_code_name(e.code())) + ": " + e.what());
      inst.attr("code") = std::string(error_code_name(e.code()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<SftfParams>(m, "SftfParams")
      .def_static(
          "random",
          [](const std::vector<std::size_t>& channels, std::uint64_t seed, const std::string& activation) {
            SeededRng rng(seed);
            return SftfParams::random(channels, rng, parse_activation(activation));
          },
          py::arg("channels"), py::arg("seed") = 0, py::arg("activation") = "relu")
      .def_static(
          "zeros",
          [](const std::vector<std::size_t>& channels, const std::string& activation) {
            return SftfParams::zeros(channels, parse_activation(activation));
          },
          py::arg("channels"), py::arg("activation") = "relu")
      .def_static("load", &io::load_params, py::arg("path"))
      .def(
          "save",
          [](const SftfParams& p, const std::string& path, bool text) {
            io::save_params(path, p, text ? io::ParamsFormat::kText : io::ParamsFormat::kBinary);
          },
          py::arg("path"), py::arg("text") = false)
      .def_property_readonly("channels",
                             [](const SftfParams& p) {
                               std::vector<std::size_t> c{p.input_width()};
                               for (const auto& l : p.layers()) c.push_back(l.out());
                               return c;
                             })
      .def_property_readonly("num_areas", &SftfParams::num_areas)
      .def_property_readonly("input_width", &SftfParams::input_width)
      .def_property_readonly("activation",
                             [](const SftfParams& p) { return p.activation() == Activation::kRelu ? "relu" : "tanh"; })
      .def("layers", [](const SftfParams& p) {
        py::list out;
        for (const auto& l : p.layers()) out.append(py::make_tuple(from_matrix(l.weight), py::array_t<double>(static_cast<py::ssize_t>(l.bias.size()), l.bias.data())));
        return out;
      });

  m.def("default_channels", &default_channels, py::arg("d"), py::arg("s"));

  m.def(
      "make_features",
      [](const F64& points, const std::string& mode) {
        return from_matrix(make_features(to_cloud(points), parse_feature_mode(mode)));
      },
      py::arg("points"), py::arg("mode") = "xyz_theta_phi");

  m.def(
      "membership",
      [](const F64& points, const SftfParams& params, const std::string& mode) {
        const auto feats = make_features(to_cloud(points), parse_feature_mode(mode));
        return from_matrix(membership(sftf_forward(feats, params)).values());
      },
      py::arg("points"), py::arg("params"), py::arg("features") = "xyz_theta_phi");

  m.def(
      "structure",
      [](const F64& points, const SftfParams& params, std::size_t n, const std::string& features, int threads) {
        const PointCloud cloud = to_cloud(points);
        StructuringResult r;
        {
          py::gil_scoped_release release;
          r = structure(cloud, params, n, {parse_feature_mode(features), threads});
        }
        return result_dict(r);
      },
      py::arg("points"), py::arg("params"), py::arg("n"), py::arg("features") = "xyz_theta_phi",
      py::arg("threads") = 1);

  m.def(
      "sample_and_group",
      [](const F64& points, const SftfParams& params, std::size_t n, const std::optional<F64>& extra,
         const std::string& features) {
        return sg_tuple(sample_and_group(to_cloud(points), params, n, optional_matrix(extra),
                                         {parse_feature_mode(features), 1}));
      },
      py::arg("points"), py::arg("params"), py::arg("n"), py::arg("extra_features") = py::none(),
      py::arg("features") = "xyz_theta_phi");

  m.def(
      "fps",
      [](const F64& points, std::size_t s, std::size_t start) {
        return from_indices(baselines::fps(to_cloud(points), s, static_cast<Index>(start)));
      },
      py::arg("points"), py::arg("s"), py::arg("start_index") = 0);

  m.def(
      "knn",
      [](const F64& points, const I64& centers, std::size_t n, int threads) {
        const PointCloud cloud = to_cloud(points);
        return from_table(baselines::knn_group(cloud, to_indices(centers, cloud.size()), n, threads));
      },
      py::arg("points"), py::arg("centers"), py::arg("n"), py::arg("threads") = 1);

  m.def(
      "ball_query",
      [](const F64& points, const I64& centers, double radius, std::size_t n, int threads) {
        const PointCloud cloud = to_cloud(points);
        return from_table(baselines::ball_query(cloud, to_indices(centers, cloud.size()), {radius, n}, threads));
      },
      py::arg("points"), py::arg("centers"), py::arg("radius"), py::arg("n"), py::arg("threads") = 1);

  m.def(
      "fps_knn",
      [](const F64& points, std::size_t s, std::size_t n) {
        return result_dict(baselines::fps_knn_pipeline(to_cloud(points), s, n));
      },
      py::arg("points"), py::arg("s"), py::arg("n"));

  m.def(
      "fps_ball_query_sample_and_group",
      [](const F64& points, std::size_t s, double radius, std::size_t n, const std::optional<F64>& extra) {
        return sg_tuple(baselines::fps_ball_query_sample_and_group(to_cloud(points), s, {radius, n},
                                                                   optional_matrix(extra)));
      },
      py::arg("points"), py::arg("s"), py::arg("radius"), py::arg("n"), py::arg("extra_features") = py::none());

  m.def(
      "symmetry_error_rate",
      [](const F64& points, const SftfParams& params, std::size_t n, double kappa, const std::string& features) {
        const PointCloud cloud = to_cloud(points);
        const FeatureMode mode = parse_feature_mode(features);
        const auto rep = bench::symmetry_error_rate(structure(cloud, params, n, {mode, 1}), cloud, kappa, mode);
        return rep.rate;
      },
      py::arg("points"), py::arg("params"), py::arg("n"), py::arg("kappa") = 2.0,
      py::arg("features") = "xyz_theta_phi");
}
