// python surface: mesh generation and IO, mesh distance metrics, image
// metrics and the TSDF quantization study

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "voxband/marching_cubes.hpp"
#include "voxband/mesh.hpp"
#include "voxband/mesh_io.hpp"
#include "voxband/metrics.hpp"
#include "voxband/synth.hpp"
#include "voxband/tsdf.hpp"

namespace py = pybind11;
using namespace voxband;

namespace {

py::tuple mesh_to_py(const TriangleMesh& mesh) {
  py::array_t<double> verts({py::ssize_t(mesh.vertices.size()), py::ssize_t(3)});
  auto v = verts.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i)
    for (int c = 0; c < 3; ++c) v(i, c) = mesh.vertices[size_t(i)][c];
  py::array_t<int> tris({py::ssize_t(mesh.triangles.size()), py::ssize_t(3)});
  auto t = tris.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < t.shape(0); ++i)
    for (int c = 0; c < 3; ++c) t(i, c) = mesh.triangles[size_t(i)][size_t(c)];
  return py::make_tuple(verts, tris);
}

TriangleMesh mesh_from_py(const py::array_t<double>& verts, const py::array_t<int>& tris) {
  if (verts.ndim() != 2 || verts.shape(1) != 3) throw py::value_error("vertices must be Nx3");
  if (tris.ndim() != 2 || tris.shape(1) != 3) throw py::value_error("triangles must be Mx3");
  TriangleMesh mesh;
  auto v = verts.unchecked<2>();
  for (py::ssize_t i = 0; i < v.shape(0); ++i)
    mesh.vertices.emplace_back(v(i, 0), v(i, 1), v(i, 2));
  auto t = tris.unchecked<2>();
  for (py::ssize_t i = 0; i < t.shape(0); ++i)
    mesh.triangles.push_back({t(i, 0), t(i, 1), t(i, 2)});
  return mesh;
}

ImageBuffer image_from_py(const py::array_t<double>& img) {
  if (img.ndim() != 3) throw py::value_error("image must be HxWxC");
  ImageBuffer out(int(img.shape(1)), int(img.shape(0)), int(img.shape(2)));
  auto a = img.unchecked<3>();
  for (py::ssize_t y = 0; y < a.shape(0); ++y)
    for (py::ssize_t x = 0; x < a.shape(1); ++x)
      for (py::ssize_t c = 0; c < a.shape(2); ++c)
        out.at(int(x), int(y), int(c)) = a(y, x, c);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sparse volumetric reconstruction toolkit";

  m.def("make_icosphere",
        [](double radius, int subdiv) { return mesh_to_py(make_icosphere(radius, subdiv)); },
        py::arg("radius_cm"), py::arg("subdivisions") = 3);
  m.def("make_humanoid",
        [](double spacing) { return mesh_to_py(make_humanoid(spacing)); },
        py::arg("grid_spacing_cm") = 1.0);
  m.def("load_mesh", [](const std::string& path) { return mesh_to_py(load_mesh(path)); },
        py::arg("path"));
  m.def("save_mesh",
        [](const std::string& path, const py::array_t<double>& v, const py::array_t<int>& t) {
          save_obj(path, mesh_from_py(v, t));
        },
        py::arg("path"), py::arg("vertices"), py::arg("triangles"));

  m.def("quantization_error",
        [](const py::array_t<double>& v, const py::array_t<int>& t, int resolution,
           double edge_cm, double truncation_cm, int samples, std::uint64_t seed) {
          const TriangleMesh mesh = mesh_from_py(v, t);
          const VolumeSpec spec = VolumeSpec::centered_cube(edge_cm, resolution);
          auto band = std::make_shared<ActiveSet>(
              mesh_band_active_set(mesh, spec, 2.0 * spec.spacing()));
          const TsdfVolume tsdf = mesh_to_tsdf(mesh, band, truncation_cm);
          return quantization_error(mesh, tsdf, samples, seed).mean_abs_error_cm;
        },
        py::arg("vertices"), py::arg("triangles"), py::arg("resolution"),
        py::arg("edge_cm") = 256.0, py::arg("truncation_cm") = 5.0,
        py::arg("samples") = 2000, py::arg("seed") = 42);

  m.def("mesh_roundtrip",
        [](const py::array_t<double>& v, const py::array_t<int>& t, int resolution,
           double edge_cm, double truncation_cm) {
          const TriangleMesh mesh = mesh_from_py(v, t);
          const VolumeSpec spec = VolumeSpec::centered_cube(edge_cm, resolution);
          auto band = std::make_shared<ActiveSet>(
              mesh_band_active_set(mesh, spec, truncation_cm + spec.spacing()));
          return mesh_to_py(extract_mesh(mesh_to_tsdf(mesh, band, truncation_cm)));
        },
        py::arg("vertices"), py::arg("triangles"), py::arg("resolution"),
        py::arg("edge_cm") = 256.0, py::arg("truncation_cm") = 5.0);

  m.def("p2s_chamfer",
        [](const py::array_t<double>& vp, const py::array_t<int>& tp,
           const py::array_t<double>& vg, const py::array_t<int>& tg, bool normalize_height) {
          DistanceOptions opt;
          opt.normalize_height_to_1m = normalize_height;
          const MeshDistanceReport r =
              p2s_chamfer(mesh_from_py(vp, tp), mesh_from_py(vg, tg), opt);
          py::dict out;
          out["p2s_precision_cm"] = r.p2s_precision;
          out["p2s_recall_cm"] = r.p2s_recall;
          out["chamfer_precision_cm"] = r.chamfer_precision;
          out["chamfer_recall_cm"] = r.chamfer_recall;
          return out;
        },
        py::arg("pred_vertices"), py::arg("pred_triangles"), py::arg("gt_vertices"),
        py::arg("gt_triangles"), py::arg("normalize_height") = false);

  m.def("psnr",
        [](const py::array_t<double>& a, const py::array_t<double>& b) {
          return psnr(image_from_py(a), image_from_py(b));
        },
        py::arg("image"), py::arg("reference"));
  m.def("ssim",
        [](const py::array_t<double>& a, const py::array_t<double>& b) {
          return ssim(image_from_py(a), image_from_py(b));
        },
        py::arg("image"), py::arg("reference"));
}
