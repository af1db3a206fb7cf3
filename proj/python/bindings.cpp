#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <string>

#include "shapecore/dispatch.hpp"
#include "shapecore/error.hpp"
#include "shapecore/features.hpp"
#include "shapecore/mesh.hpp"
#include "shapecore/npy.hpp"
#include "shapecore/volume.hpp"

namespace py = pybind11;
namespace sc = shapecore;

using Triple = std::array<double, 3>;
using MaskArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

sc::Spacing to_spacing(const Triple& s) { return {s[0], s[1], s[2]}; }

// numpy arrays are (z, y, x); the core volume indexes x fastest, which is the same layout.
sc::MaskVolume to_mask(const MaskArray& arr, const Triple& spacing, std::optional<std::int64_t> label) {
    if (arr.ndim() != 3) {
        throw sc::Error(sc::ErrorCode::NotThreeDimensional,
                        "expected a 3-D array, got " + std::to_string(arr.ndim()) + " dimensions");
    }
    const sc::Dims dims{static_cast<std::size_t>(arr.shape(2)), static_cast<std::size_t>(arr.shape(1)),
                        static_cast<std::size_t>(arr.shape(0))};
    auto vol = sc::binarize(dims, {arr.data(), dims.count()}, label);
    return sc::attach_spacing(vol, to_spacing(spacing));
}

py::array_t<std::uint8_t> to_array(const sc::MaskVolume& vol) {
    const auto& d = vol.dims();
    py::array_t<std::uint8_t> out({d.nz, d.ny, d.nx});
    std::memcpy(out.mutable_data(), vol.data().data(), vol.data().size());
    return out;
}

py::dict features_dict(const sc::ShapeFeatures& f) {
    py::dict d;
    d["MeshVolume"] = f.mesh_volume;
    d["SurfaceArea"] = f.surface_area;
    d["Maximum3DDiameter"] = f.max_3d_diameter;
    d["Maximum2DDiameterXY"] = f.max_2d_diameter_xy;
    d["Maximum2DDiameterXZ"] = f.max_2d_diameter_xz;
    d["Maximum2DDiameterYZ"] = f.max_2d_diameter_yz;
    d["VertexCount"] = f.vertex_count;
    return d;
}

py::dict timings_dict(const sc::StageTimings& t) {
    py::dict d;
    d["file_read_ms"] = t.file_read_ms;
    d["mesh_ms"] = t.mesh_ms;
    d["diameters_ms"] = t.diameters_ms;
    d["total_ms"] = t.total_ms;
    return d;
}

py::dict backend_dict(const sc::BackendSelection& b) {
    py::dict d;
    d["requested"] = std::string(sc::to_string(b.requested));
    d["resolved"] = std::string(sc::to_string(b.resolved));
    d["fallback_reason"] = b.fallback_reason;
    d["workers"] = b.worker_count;
    return d;
}

py::dict diameters_dict(const sc::Diameters& d) {
    py::dict out;
    out["Maximum3DDiameter"] = d.max_3d;
    out["Maximum2DDiameterXY"] = d.xy;
    out["Maximum2DDiameterXZ"] = d.xz;
    out["Maximum2DDiameterYZ"] = d.yz;
    return out;
}

sc::ShapeKind parse_kind(const std::string& kind) {
    if (kind == "sphere") return sc::ShapeKind::Sphere;
    if (kind == "ellipsoid") return sc::ShapeKind::Ellipsoid;
    if (kind == "box") return sc::ShapeKind::Box;
    throw sc::Error(sc::ErrorCode::InvalidArgument, "unknown shape '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Mask volume to surface mesh and shape features.";

    static py::exception<sc::Error> shape_error(m, "ShapeError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const sc::Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(shape_error)(e.what());
            inst.attr("code") = std::string(sc::to_string(e.code()));
            PyErr_SetObject(shape_error.ptr(), inst.ptr());
        }
    });

    m.def(
        "load_npy",
        [](const std::filesystem::path& path, std::optional<std::int64_t> label) {
            return to_array(sc::load_npy(path, label));
        },
        py::arg("path"), py::arg("label") = py::none(),
        "Read a .npy file and return its binarized mask as a uint8 (z, y, x) array.");

    m.def(
        "save_npy",
        [](const MaskArray& mask, const std::filesystem::path& path, std::optional<std::int64_t> label) {
            sc::save_npy(to_mask(mask, {1, 1, 1}, label), path);
        },
        py::arg("mask"), py::arg("path"), py::arg("label") = py::none(),
        "Binarize `mask` and write it as a uint8 .npy file.");

    m.def(
        "synth_mask",
        [](const std::string& kind, std::array<std::size_t, 3> dims, std::optional<double> radius,
           std::optional<Triple> radii, std::optional<Triple> center, std::optional<std::array<std::size_t, 3>> lo,
           std::optional<std::array<std::size_t, 3>> hi) {
            sc::ShapeParams p;
            p.center = center;
            if (radius) p.radii = {*radius, *radius, *radius};
            if (radii) p.radii = *radii;
            if (lo) p.lo = *lo;
            if (hi) p.hi = *hi;
            return to_array(sc::synth_mask(parse_kind(kind), p, {dims[0], dims[1], dims[2]}));
        },
        py::arg("kind"), py::arg("dims"), py::kw_only(), py::arg("radius") = py::none(),
        py::arg("radii") = py::none(), py::arg("center") = py::none(), py::arg("lo") = py::none(),
        py::arg("hi") = py::none(),
        "Synthetic sphere, ellipsoid or box mask. `dims`, `center`, `lo` and `hi` are (x, y, z).");

    m.def(
        "marching_cubes",
        [](const MaskArray& mask, Triple spacing, unsigned workers) {
            const auto vol = to_mask(mask, spacing, std::nullopt);
            sc::TriangleMesh mesh;
            {
                py::gil_scoped_release release;
                mesh = sc::marching_cubes(vol, workers);
            }
            const std::size_t n = mesh.vertex_count();
            py::array_t<double> verts({n, std::size_t{3}});
            auto v = verts.mutable_unchecked<2>();
            for (std::size_t i = 0; i < n; ++i) {
                v(i, 0) = mesh.vertices.x[i];
                v(i, 1) = mesh.vertices.y[i];
                v(i, 2) = mesh.vertices.z[i];
            }
            py::array_t<std::uint32_t> tris({mesh.triangle_count(), std::size_t{3}});
            std::memcpy(tris.mutable_data(), mesh.triangles.data(), mesh.triangles.size() * sizeof(mesh.triangles[0]));
            return py::make_tuple(verts, tris);
        },
        py::arg("mask"), py::arg("spacing") = Triple{1, 1, 1}, py::arg("workers") = 1u,
        "Surface mesh of a mask. Returns (vertices[N, 3] as x, y, z; triangles[T, 3]).");

    m.def(
        "diameters",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& vertices,
           std::optional<unsigned> workers) {
            if (vertices.ndim() != 2 || vertices.shape(1) != 3) {
                throw sc::Error(sc::ErrorCode::InvalidArgument, "vertices must have shape (N, 3)");
            }
            const auto n = static_cast<std::size_t>(vertices.shape(0));
            sc::VertexArrays soa;
            auto v = vertices.unchecked<2>();
            for (std::size_t i = 0; i < n; ++i) {
                soa.x.push_back(v(i, 0));
                soa.y.push_back(v(i, 1));
                soa.z.push_back(v(i, 2));
            }
            sc::Diameters d;
            {
                py::gil_scoped_release release;
                const sc::VertexView view{soa.x, soa.y, soa.z};
                d = workers ? sc::diameters_parallel(view, *workers) : sc::diameters(view);
            }
            return diameters_dict(d);
        },
        py::arg("vertices"), py::arg("workers") = py::none(),
        "Maximum 3-D and planar diameters of a point cloud. Parallel when `workers` is given.");

    m.def(
        "resolve_backend",
        [](const std::string& request, std::optional<unsigned> workers) {
            return backend_dict(sc::resolve_backend(sc::parse_backend_request(request), workers));
        },
        py::arg("request") = "auto", py::arg("workers") = py::none());

    m.def(
        "extract_features",
        [](const MaskArray& mask, Triple spacing, const std::string& backend, std::optional<unsigned> workers,
           std::optional<std::int64_t> label) {
            const auto vol = to_mask(mask, spacing, label);
            const auto sel = sc::resolve_backend(sc::parse_backend_request(backend), workers);
            sc::FeatureResult r;
            {
                py::gil_scoped_release release;
                r = sc::extract_features(vol, sel);
            }
            py::dict out;
            out["features"] = features_dict(r.features);
            out["timings"] = timings_dict(r.timings);
            out["backend"] = backend_dict(sel);
            return out;
        },
        py::arg("mask"), py::arg("spacing") = Triple{1, 1, 1}, py::arg("backend") = "auto",
        py::arg("workers") = py::none(), py::arg("label") = py::none(),
        "Shape features of an in-memory mask. Returns {features, timings, backend}.");

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& path, Triple spacing, const std::string& backend,
           std::optional<unsigned> workers, std::optional<std::int64_t> label) {
            const auto request = sc::parse_backend_request(backend);
            sc::PipelineResult r;
            {
                py::gil_scoped_release release;
                r = sc::run_pipeline(path, to_spacing(spacing), request, workers, label);
            }
            py::dict out;
            out["features"] = features_dict(r.features);
            out["timings"] = timings_dict(r.timings);
            out["backend"] = backend_dict(r.backend);
            return out;
        },
        py::arg("path"), py::arg("spacing") = Triple{1, 1, 1}, py::arg("backend") = "auto",
        py::arg("workers") = py::none(), py::arg("label") = py::none(),
        "Load a .npy mask and compute its shape features. Returns {features, timings, backend}.");

    m.def(
        "features_json",
        [](const std::filesystem::path& path, Triple spacing, std::optional<std::int64_t> label) {
            return sc::to_json(
                sc::run_pipeline(path, to_spacing(spacing), sc::BackendSelection::sequential(), label).features);
        },
        py::arg("path"), py::arg("spacing") = Triple{1, 1, 1}, py::arg("label") = py::none(),
        "Features of a .npy mask as the JSON document the command-line tool prints.");

    m.attr("__version__") = "0.1.0";
}
