#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "xxlseg/xxlseg.hpp"

namespace py = pybind11;
using namespace xxlseg;

namespace {

// Arrays are indexed [z, y, x], which matches the x-fastest voxel layout.
template <typename T>
Volume<T> from_array(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw InvalidArgument("expected a 3D array indexed [z, y, x]");
  Volume<T> v(Vec3{a.shape(2), a.shape(1), a.shape(0)});
  std::memcpy(v.voxels().data(), a.data(), sizeof(T) * static_cast<std::size_t>(v.size()));
  return v;
}

template <typename T>
py::array_t<T> to_array(const Volume<T>& v) {
  const Vec3 d = v.dims();
  py::array_t<T> a({d.z, d.y, d.x});
  std::memcpy(a.mutable_data(), v.voxels().data(), sizeof(T) * static_cast<std::size_t>(v.size()));
  return a;
}

using LabelArray = py::array_t<Label, py::array::c_style | py::array::forcecast>;
using ScalarArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Connectivity connectivity(int n) {
  if (n == 6) return Connectivity::Six;
  if (n == 26) return Connectivity::TwentySix;
  throw InvalidArgument("connectivity must be 6 or 26");
}

Axis axis_from(const std::string& s) {
  if (s == "X" || s == "x") return Axis::X;
  if (s == "Y" || s == "y") return Axis::Y;
  if (s == "Z" || s == "z") return Axis::Z;
  throw InvalidArgument("axis must be one of X, Y, Z");
}

py::dict group(const GroupStats& g) {
  py::dict d;
  d["max"] = g.max;
  d["mean"] = g.mean;
  d["std"] = g.std;
  d["count"] = g.count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_xxlseg, m) {
  m.doc() = "Instance segmentation postprocessing and evaluation for large CT volumes";
  m.attr("__version__") = XXLSEG_VERSION;

  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("set_thread_count", &set_thread_count, py::arg("n"));
  m.def("thread_count", &thread_count);

  m.def(
      "load_volume",
      [](const std::filesystem::path& path) -> py::array {
        const AnyVolume v = load_volume(path);
        if (const auto* l = std::get_if<LabelVolume>(&v)) return to_array(*l);
        return to_array(std::get<ScalarVolume>(v));
      },
      py::arg("path"));
  m.def(
      "save_volume",
      [](py::array a, const std::filesystem::path& path) {
        if (py::dtype::of<float>().is(a.dtype()) || py::dtype::of<double>().is(a.dtype())) {
          save_volume(from_array<float>(a), path);
        } else {
          save_volume(from_array<Label>(a), path);
        }
      },
      py::arg("array"), py::arg("path"), "Floating arrays are stored as scalar-f32, others as label-u32.");

  m.def(
      "generate_phantom",
      [](const std::string& spec_json) {
        const Phantom ph = generate_phantom(phantom_spec_from_json(spec_json));
        return py::make_tuple(to_array(ph.intensity), to_array(ph.labels));
      },
      py::arg("spec_json"), "Returns (intensity, labels) for a JSON phantom spec.");
  m.def(
      "random_phantom_spec",
      [](std::uint64_t seed, std::array<std::int64_t, 3> shape) {
        return phantom_spec_to_json(random_phantom_spec(seed, Vec3{shape[2], shape[1], shape[0]}));
      },
      py::arg("seed"), py::arg("shape"), "JSON spec of a random phantom; `shape` is (z, y, x).");

  py::class_<SliceStack>(m, "SliceStack")
      .def_static(
          "from_labels", [](const LabelArray& labels) { return perfect_slice_stack(from_array<Label>(labels)); },
          py::arg("labels"))
      .def_static("load", &load_slice_stack, py::arg("directory"))
      .def("save", [](const SliceStack& s, const std::filesystem::path& dir) { save_slice_stack(s, dir); },
           py::arg("directory"))
      .def(
          "corrupt",
          [](const SliceStack& s, std::uint64_t seed, double split_rate, double drop_rate) {
            return corrupt_stack(s, seed, split_rate, drop_rate);
          },
          py::arg("seed"), py::arg("split_rate"), py::arg("drop_rate"))
      .def_property_readonly("shape",
                             [](const SliceStack& s) { return py::make_tuple(s.dims().z, s.dims().y, s.dims().x); })
      .def(
          "map",
          [](const SliceStack& s, const std::string& axis, std::int64_t index) {
            return to_array(s.map(axis_from(axis), index));
          },
          py::arg("axis"), py::arg("index"));

  m.def(
      "run_fusion_pipeline",
      [](const SliceStack& stack, double line_overlap_threshold, double reinsert_overlap_threshold,
         const std::string& start_axis, std::optional<std::int64_t> start_index, int closing_iterations,
         int closing_element) {
        MatchConfig c;
        c.line_overlap_threshold = line_overlap_threshold;
        c.reinsert_overlap_threshold = reinsert_overlap_threshold;
        c.start_axis = axis_from(start_axis);
        c.start_index = start_index;
        c.closing_iterations = closing_iterations;
        c.closing_element = connectivity(closing_element);
        LabelVolume fused;
        {
          py::gil_scoped_release release;
          fused = run_fusion_pipeline(stack, c);
        }
        return to_array(fused);
      },
      py::arg("stack"), py::arg("line_overlap_threshold") = 0.5, py::arg("reinsert_overlap_threshold") = 0.5,
      py::arg("start_axis") = "Z", py::arg("start_index") = py::none(), py::arg("closing_iterations") = 1,
      py::arg("closing_element") = 6);

  m.def(
      "labels_to_three_class",
      [](const LabelArray& labels, int border_thickness) {
        return to_array(labels_to_three_class(from_array<Label>(labels), border_thickness).volume());
      },
      py::arg("labels"), py::arg("border_thickness") = 1);
  m.def(
      "run_watershed_pipeline",
      [](const LabelArray& classes, std::int64_t min_marker_size, int conn) {
        const ThreeClassVolume c(from_array<Label>(classes));
        return to_array(run_watershed_pipeline(c, {min_marker_size, connectivity(conn)}));
      },
      py::arg("classes"), py::arg("min_marker_size") = 0, py::arg("connectivity") = 6);
  m.def(
      "tv_denoise",
      [](const ScalarArray& volume, double weight, int max_iterations, double tolerance) {
        const TvDenoiseResult r = tv_denoise_traced(from_array<float>(volume), {weight, max_iterations, tolerance});
        return py::make_tuple(to_array(r.volume), r.objective);
      },
      py::arg("volume"), py::arg("weight") = 0.1, py::arg("max_iterations") = 100, py::arg("tolerance") = 1e-4,
      "Returns (denoised, objective per iteration).");
  m.def(
      "morphology",
      [](const LabelArray& labels, const std::string& op, int element, int iterations) {
        const MorphOp o = op == "dilate" ? MorphOp::Dilate
                          : op == "erode" ? MorphOp::Erode
                          : op == "close" ? MorphOp::Close
                                          : throw InvalidArgument("op must be dilate, erode or close");
        return to_array(morphology(from_array<Label>(labels), o, connectivity(element), iterations));
      },
      py::arg("labels"), py::arg("op"), py::arg("element") = 6, py::arg("iterations") = 1);
  m.def(
      "connected_components",
      [](const LabelArray& labels, int conn) {
        return to_array(connected_components(from_array<Label>(labels), connectivity(conn)));
      },
      py::arg("labels"), py::arg("connectivity") = 26);
  m.def(
      "cc_postprocess_proposal",
      [](const LabelArray& labels, int conn) {
        return to_array(cc_postprocess_proposal(from_array<Label>(labels), connectivity(conn)));
      },
      py::arg("proposal"), py::arg("connectivity") = 26);

  m.def(
      "build_correlation_matrix",
      [](const LabelArray& reference, const LabelArray& proposal, std::int64_t min_segment_voxels) {
        const CorrelationMatrix cm =
            build_correlation_matrix(from_array<Label>(reference), from_array<Label>(proposal), min_segment_voxels);
        py::array_t<double> iou({cm.rows(), cm.cols()});
        if (!cm.iou.empty()) std::memcpy(iou.mutable_data(), cm.iou.data(), sizeof(double) * cm.iou.size());
        const DiagonalStats s = diagonal_stats(cm);
        py::dict out;
        out["reference_labels"] = cm.reference_labels;
        out["detected_labels"] = cm.detected_labels;
        out["iou"] = iou;
        out["diagonal"] = cm.diagonal();
        out["stats"] = py::dict(py::arg("all") = group(s.all), py::arg("large") = group(s.large),
                                py::arg("small") = group(s.small));
        return out;
      },
      py::arg("reference"), py::arg("proposal"), py::arg("min_segment_voxels") = 100);
  m.def(
      "diagonal_stats",
      [](const std::vector<double>& diagonal) {
        const DiagonalStats s = diagonal_stats(diagonal);
        return py::dict(py::arg("all") = group(s.all), py::arg("large") = group(s.large),
                        py::arg("small") = group(s.small));
      },
      py::arg("diagonal"));
}
