// Copyright 2026 The spatialift Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "spatialift/coord_codec.hpp"
#include "spatialift/dataset_builder.hpp"
#include "spatialift/dataset_io.hpp"
#include "spatialift/errors.hpp"
#include "spatialift/eval_harness.hpp"
#include "spatialift/model_gateway.hpp"

namespace py = pybind11;
using namespace spatialift;

namespace {

using Box = std::array<double, 4>;
using Point = std::array<double, 2>;
using Dims = std::array<int, 2>;

ImageDims dims_of(const Dims& d) { return {d[0], d[1]}; }

py::array_t<double> pool(py::array_t<double, py::array::c_style | py::array::forcecast> grid, int jobs) {
  if (grid.ndim() != 3) throw InvalidArgument("grid must have shape (frames, spatial, features)");
  TokenGrid g;
  g.frames = grid.shape(0);
  g.spatial = grid.shape(1);
  g.features = grid.shape(2);
  g.values.assign(grid.data(), grid.data() + grid.size());
  PooledTokens out;
  {
    py::gil_scoped_release release;
    out = spatiotemporal_pool(g, jobs);
  }
  py::array_t<double> result({out.rows, out.features});
  std::copy(out.values.begin(), out.values.end(), result.mutable_data());
  return result;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coordinate codecs, dataset builders and metrics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DegenerateDecode>(m, "DegenerateDecode", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<ReprScheme>(m, "Scheme")
      .def_static("nfp", &ReprScheme::nfp, py::arg("decimals") = 4)
      .def_static("ivb", &ReprScheme::ivb, py::arg("bins") = 224)
      .def_static("diga", &ReprScheme::diga, py::arg("grid") = 16, py::arg("patch_size") = 14)
      .def_static("from_id", [](const std::string& id) { return ReprScheme::from_id(id); })
      .def_property_readonly("id", &ReprScheme::id)
      .def_property_readonly("kind", [](const ReprScheme& s) { return to_string(s.kind()); })
      .def("__eq__", [](const ReprScheme& a, const ReprScheme& b) { return a == b; })
      .def("__repr__", [](const ReprScheme& s) { return "Scheme(" + s.id() + ")"; });

  m.def("encode_bbox", [](const Box& b, const Dims& d, const ReprScheme& s) {
    return encode_bbox({b[0], b[1], b[2], b[3]}, dims_of(d), s).text;
  }, py::arg("bbox"), py::arg("dims"), py::arg("scheme"));
  m.def("encode_point", [](const Point& p, const Dims& d, const ReprScheme& s) {
    return encode_point({p[0], p[1]}, dims_of(d), s).text;
  }, py::arg("point"), py::arg("dims"), py::arg("scheme"));
  m.def("decode_bbox", [](const std::string& text, const Dims& d, const ReprScheme& s) {
    const BBox b = decode_bbox({text, s, LocationForm::BBox}, dims_of(d));
    return std::make_tuple(b.x1, b.y1, b.x2, b.y2);
  }, py::arg("text"), py::arg("dims"), py::arg("scheme"));
  m.def("decode_point", [](const std::string& text, const Dims& d, const ReprScheme& s) {
    const PointLoc p = decode_point({text, s, LocationForm::Point}, dims_of(d));
    return std::make_tuple(p.cx, p.cy);
  }, py::arg("text"), py::arg("dims"), py::arg("scheme"));
  m.def("nearest_anchor", [](const Point& p, const Dims& d, const ReprScheme& s) {
    const auto a = nearest_anchor({p[0], p[1]}, dims_of(d), s);
    return std::make_tuple(a.p, a.q);
  }, py::arg("point"), py::arg("dims"), py::arg("scheme"));
  m.def("quantization_error_bound", &quantization_error_bound, py::arg("scheme"), py::arg("dim"));
  m.def("numeric_token_cost", [](const std::string& s) { return numeric_token_cost(s); });

  m.def("score_meteor", [](const std::string& ref, const std::string& hyp) { return score_meteor(ref, hyp); },
        py::arg("reference"), py::arg("hypothesis"));
  m.def("meteor_detail", [](const std::string& ref, const std::string& hyp) {
    const auto d = meteor_detail(ref, hyp);
    py::dict out;
    out["matches"] = d.matches;
    out["chunks"] = d.chunks;
    out["precision"] = d.precision;
    out["recall"] = d.recall;
    out["fmean"] = d.fmean;
    out["penalty"] = d.penalty;
    out["score"] = d.score;
    return out;
  }, py::arg("reference"), py::arg("hypothesis"));
  m.def("spatial_correct", [](const std::string& response, const std::string& gt, const std::string& mode) {
    return spatial_correct(response, side_from_string(gt), spatial_mode_from_string(mode));
  }, py::arg("response"), py::arg("gt"), py::arg("mode") = "strict");
  m.def("keyword_stats", [](const std::vector<std::string>& conversations, const std::vector<std::string>& phrases) {
    std::vector<std::tuple<std::string, std::size_t, double>> out;
    for (const auto& [p, s] : corpus_keyword_stats(conversations, phrases)) out.emplace_back(p, s.count, s.fraction);
    return out;
  }, py::arg("conversations"), py::arg("phrases"));
  m.def("spatiotemporal_pool", &pool, py::arg("grid"), py::arg("jobs") = 1);

  // Record-level helpers exchange JSON text; the package wrapper decodes it.
  m.def("_build_spatial_bench", [](const std::string& coco, std::uint64_t seed, bool icl) {
    PromptEngine eng;
    SpatialBenchConfig cfg;
    cfg.seed = seed;
    cfg.icl = icl;
    std::vector<std::string> out;
    for (const auto& it : build_spatial_bench(io::parse_coco(coco).images, cfg, eng)) {
      out.push_back(io::to_json(it).dump());
    }
    return out;
  });
  m.def("run_cli", [](const std::vector<std::string>& args) {
    py::gil_scoped_release release;
    return cli::run(args);
  }, py::arg("args"));
}
