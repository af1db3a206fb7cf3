#include "shapecore/features.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "parallel.hpp"
#include "shapecore/dispatch.hpp"
#include "shapecore/error.hpp"

namespace shapecore {

namespace {

constexpr std::size_t kSumLeaf = 32;

double pairwise_sum_range(const double* v, std::size_t n) noexcept {
    if (n <= kSumLeaf) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_range(v, half) + pairwise_sum_range(v + half, n - half);
}

struct Point {
    double x, y, z;
};

Point vertex(const VertexArrays& v, std::uint32_t i) { return {v.x[i], v.y[i], v.z[i]}; }

Point cross(Point a, Point b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double triangle_area(const TriangleMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Point a = vertex(mesh.vertices, tri[0]);
    const Point b = vertex(mesh.vertices, tri[1]);
    const Point c = vertex(mesh.vertices, tri[2]);
    const Point n = cross({b.x - a.x, b.y - a.y, b.z - a.z}, {c.x - a.x, c.y - a.y, c.z - a.z});
    return 0.5 * std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
}

double signed_tetra_volume(const TriangleMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Point a = vertex(mesh.vertices, tri[0]);
    const Point bc = cross(vertex(mesh.vertices, tri[1]), vertex(mesh.vertices, tri[2]));
    return (a.x * bc.x + a.y * bc.y + a.z * bc.z) / 6.0;
}

constexpr std::size_t kTriangleChunk = 16384;

template <typename Term>
double sum_terms(const TriangleMesh& mesh, unsigned workers, Term term) {
    const std::size_t n = mesh.triangle_count();
    std::vector<double> values(n);
    const std::size_t chunks = (n + kTriangleChunk - 1) / kTriangleChunk;
    detail::parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(n, (c + 1) * kTriangleChunk);
        for (std::size_t t = c * kTriangleChunk; t < end; ++t) values[t] = term(mesh, t);
    });
    return pairwise_sum(values);
}

// Squared-distance maxima. Each field starts at 0, which is also the answer
// for a plane with no qualifying pair.
struct Maxima {
    double d3 = 0.0;
    double xy = 0.0;
    double xz = 0.0;
    double yz = 0.0;

    void merge(const Maxima& o) noexcept {
        d3 = std::max(d3, o.d3);
        xy = std::max(xy, o.xy);
        xz = std::max(xz, o.xz);
        yz = std::max(yz, o.yz);
    }
};

constexpr std::size_t kLanes = 8;

// Pairs (i, j) for j in (i, n). Lane-split accumulators keep the loop free of
// a loop-carried max so the compiler can vectorize it.
void accumulate_row(const VertexView& v, std::size_t i, Maxima& out) noexcept {
    const std::size_t n = v.size();
    const double* __restrict xs = v.x.data();
    const double* __restrict ys = v.y.data();
    const double* __restrict zs = v.z.data();
    const double xi = xs[i];
    const double yi = ys[i];
    const double zi = zs[i];

    double d3[kLanes] = {};
    double xy[kLanes] = {};
    double xz[kLanes] = {};
    double yz[kLanes] = {};

    std::size_t j = i + 1;
    for (; j + kLanes <= n; j += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
            const double xj = xs[j + l];
            const double yj = ys[j + l];
            const double zj = zs[j + l];
            const double dx = xi - xj;
            const double dy = yi - yj;
            const double dz = zi - zj;
            const double d2 = dx * dx + dy * dy + dz * dz;
            // Off-plane pairs contribute 0, which never beats a running max.
            const double in_xy = zj == zi ? d2 : 0.0;
            const double in_xz = yj == yi ? d2 : 0.0;
            const double in_yz = xj == xi ? d2 : 0.0;
            d3[l] = d2 > d3[l] ? d2 : d3[l];
            xy[l] = in_xy > xy[l] ? in_xy : xy[l];
            xz[l] = in_xz > xz[l] ? in_xz : xz[l];
            yz[l] = in_yz > yz[l] ? in_yz : yz[l];
        }
    }
    for (; j < n; ++j) {
        const double dx = xi - xs[j];
        const double dy = yi - ys[j];
        const double dz = zi - zs[j];
        const double d2 = dx * dx + dy * dy + dz * dz;
        d3[0] = std::max(d3[0], d2);
        if (zs[j] == zi) xy[0] = std::max(xy[0], d2);
        if (ys[j] == yi) xz[0] = std::max(xz[0], d2);
        if (xs[j] == xi) yz[0] = std::max(yz[0], d2);
    }
    for (std::size_t l = 0; l < kLanes; ++l) {
        out.merge({d3[l], xy[l], xz[l], yz[l]});
    }
}

Diameters finish(const Maxima& m) {
    return {std::sqrt(m.d3), std::sqrt(m.xy), std::sqrt(m.xz), std::sqrt(m.yz)};
}

void check_view(const VertexView& v) {
    if (v.size() == 0) throw Error(ErrorCode::NoVertices, "diameters need at least one vertex");
    if (v.y.size() != v.size() || v.z.size() != v.size()) {
        throw Error(ErrorCode::InvalidArgument, "coordinate arrays differ in length");
    }
}

constexpr std::size_t kRowBlock = 64;

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
    return pairwise_sum_range(values.data(), values.size());
}

double surface_area(const TriangleMesh& mesh) { return sum_terms(mesh, 1, triangle_area); }

double surface_area_parallel(const TriangleMesh& mesh, unsigned workers) {
    return sum_terms(mesh, workers, triangle_area);
}

double signed_mesh_volume(const TriangleMesh& mesh) {
    return sum_terms(mesh, 1, signed_tetra_volume);
}

double mesh_volume(const TriangleMesh& mesh) { return std::abs(signed_mesh_volume(mesh)); }

double mesh_volume_parallel(const TriangleMesh& mesh, unsigned workers) {
    return std::abs(sum_terms(mesh, workers, signed_tetra_volume));
}

Diameters diameters(VertexView vertices) {
    check_view(vertices);
    Maxima m;
    for (std::size_t i = 0; i < vertices.size(); ++i) accumulate_row(vertices, i, m);
    return finish(m);
}

Diameters diameters_parallel(VertexView vertices, unsigned workers) {
    check_view(vertices);
    const std::size_t n = vertices.size();
    const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
    // One private result per block; merged after the workers join.
    std::vector<Maxima> partial(blocks);
    detail::parallel_for(blocks, workers, [&](std::size_t b) {
        Maxima local;
        const std::size_t end = std::min(n, (b + 1) * kRowBlock);
        for (std::size_t i = b * kRowBlock; i < end; ++i) accumulate_row(vertices, i, local);
        partial[b] = local;
    });
    Maxima m;
    for (const auto& p : partial) m.merge(p);
    return finish(m);
}

FeatureResult extract_features(const MaskVolume& vol, const BackendSelection& backend) {
    const Stopwatch total;
    const bool parallel = backend.resolved == Backend::Parallel;
    const unsigned workers = parallel ? std::max(1u, backend.worker_count) : 1u;

    FeatureResult out;
    Stopwatch stage;
    const TriangleMesh mesh = marching_cubes(vol, workers);
    out.timings.mesh_ms = stage.elapsed_ms();

    out.features.vertex_count = mesh.vertex_count();
    out.features.surface_area = parallel ? surface_area_parallel(mesh, workers) : surface_area(mesh);
    out.features.mesh_volume = parallel ? mesh_volume_parallel(mesh, workers) : mesh_volume(mesh);

    stage.reset();
    const Diameters d = parallel ? diameters_parallel(mesh.view(), workers) : diameters(mesh.view());
    out.timings.diameters_ms = stage.elapsed_ms();

    out.features.max_3d_diameter = d.max_3d;
    out.features.max_2d_diameter_xy = d.xy;
    out.features.max_2d_diameter_xz = d.xz;
    out.features.max_2d_diameter_yz = d.yz;
    out.timings.total_ms = total.elapsed_ms();
    return out;
}

std::string to_json(const ShapeFeatures& f, int indent) {
    nlohmann::ordered_json j;
    j["MeshVolume"] = f.mesh_volume;
    j["SurfaceArea"] = f.surface_area;
    j["Maximum3DDiameter"] = f.max_3d_diameter;
    j["Maximum2DDiameterXY"] = f.max_2d_diameter_xy;
    j["Maximum2DDiameterXZ"] = f.max_2d_diameter_xz;
    j["Maximum2DDiameterYZ"] = f.max_2d_diameter_yz;
    j["VertexCount"] = f.vertex_count;
    return j.dump(indent);
}

}  // namespace shapecore
