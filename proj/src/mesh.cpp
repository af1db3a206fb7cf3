#include "shapecore/mesh.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "shapecore/error.hpp"

namespace shapecore {

namespace {

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

// Axis along which edge e runs, and the offset of its lower corner.
struct EdgeInfo {
    int axis;
    std::array<int, 3> origin;
};

constexpr std::array<EdgeInfo, 12> make_edge_info() {
    std::array<EdgeInfo, 12> out{};
    for (std::size_t e = 0; e < 12; ++e) {
        const auto& a = kCornerOffsets[kEdgeCorners[e][0]];
        const auto& b = kCornerOffsets[kEdgeCorners[e][1]];
        int axis = 0;
        for (int i = 0; i < 3; ++i) {
            if (a[i] != b[i]) axis = i;
        }
        out[e] = {axis, a};
    }
    return out;
}

constexpr auto kEdgeInfo = make_edge_info();

// Global edge key: ((gz * py + gy) * px + gx) * 3 + axis over padded grid points.
struct Grid {
    std::size_t px, py, pz;

    std::uint64_t key(std::size_t gx, std::size_t gy, std::size_t gz, int axis) const noexcept {
        return ((static_cast<std::uint64_t>(gz) * py + gy) * px + gx) * 3 + static_cast<std::uint64_t>(axis);
    }
    std::size_t layer_size() const noexcept { return px * py * 3; }
};

// Cell layer cz only touches edges owned by grid layers cz and cz + 1, so two
// rolling index buffers are enough to deduplicate.
class VertexMerger {
public:
    VertexMerger(const Grid& grid, const Spacing& spacing, TriangleMesh& mesh)
        : grid_(grid), spacing_(spacing), mesh_(mesh),
          lower_(grid.layer_size(), kUnassigned), upper_(grid.layer_size(), kUnassigned) {}

    void begin_layer(std::size_t cz) {
        if (cz == base_) return;
        if (cz == base_ + 1) {
            std::swap(lower_, upper_);
        } else {
            std::fill(lower_.begin(), lower_.end(), kUnassigned);
        }
        std::fill(upper_.begin(), upper_.end(), kUnassigned);
        base_ = cz;
    }

    std::uint32_t index_of(std::uint64_t key) {
        const std::uint64_t per_layer = grid_.layer_size();
        const std::uint64_t gz = key / per_layer;
        const std::uint64_t slot = key % per_layer;
        auto& layer = gz == base_ ? lower_ : upper_;
        std::uint32_t& id = layer[slot];
        if (id == kUnassigned) {
            id = static_cast<std::uint32_t>(mesh_.vertices.size());
            emit_vertex(gz, slot);
        }
        return id;
    }

private:
    void emit_vertex(std::uint64_t gz, std::uint64_t slot) {
        const int axis = static_cast<int>(slot % 3);
        const std::uint64_t point = slot / 3;
        const std::array<std::uint64_t, 3> g{point % grid_.px, point / grid_.px, gz};
        const std::array<double, 3> s{spacing_.sx, spacing_.sy, spacing_.sz};
        // Padded index g is unpadded index g - 1; the crossed axis adds 0.5.
        std::array<double, 3> p{};
        for (int a = 0; a < 3; ++a) {
            const double shift = a == axis ? 0.5 : 1.0;
            p[a] = (static_cast<double>(g[a]) - shift) * s[a];
        }
        mesh_.vertices.x.push_back(p[0]);
        mesh_.vertices.y.push_back(p[1]);
        mesh_.vertices.z.push_back(p[2]);
    }

    const Grid& grid_;
    const Spacing& spacing_;
    TriangleMesh& mesh_;
    std::vector<std::uint32_t> lower_;
    std::vector<std::uint32_t> upper_;
    std::size_t base_ = 0;
};

// Edge keys of every triangle in one layer of cells, three per triangle, in
// ascending cell order then table order.
void scan_layer(const MaskVolume& padded, const Grid& grid, std::size_t cz,
                std::vector<std::uint64_t>& keys) {
    const auto& table = case_table();
    const auto data = padded.data();
    const std::size_t px = grid.px;
    const std::size_t py = grid.py;
    auto at = [&](std::size_t x, std::size_t y, std::size_t z) { return data[x + px * (y + py * z)]; };

    for (std::size_t cy = 0; cy + 1 < py; ++cy) {
        for (std::size_t cx = 0; cx + 1 < px; ++cx) {
            unsigned cube = 0;
            for (unsigned c = 0; c < 8; ++c) {
                const auto& o = kCornerOffsets[c];
                if (at(cx + o[0], cy + o[1], cz + o[2]) == 0) cube |= 1u << c;
            }
            if (cube == 0 || cube == 255) continue;
            const auto& row = table[cube];
            for (int t = 0; t < 16 && row[t] != -1; t += 3) {
                // With background corners flagged, table order already winds
                // counter-clockwise seen from outside.
                for (int k = 0; k < 3; ++k) {
                    const auto& info = kEdgeInfo[static_cast<std::size_t>(row[t + k])];
                    keys.push_back(grid.key(cx + info.origin[0], cy + info.origin[1],
                                            cz + info.origin[2], info.axis));
                }
            }
        }
    }
}

}  // namespace

MaskVolume pad_mask(const MaskVolume& vol) {
    const Dims& d = vol.dims();
    const Dims p{d.nx + 2, d.ny + 2, d.nz + 2};
    std::vector<std::uint8_t> out(p.count(), 0);
    const auto src = vol.data();
    for (std::size_t z = 0; z < d.nz; ++z)
        for (std::size_t y = 0; y < d.ny; ++y) {
            const std::size_t from = d.nx * (y + d.ny * z);
            const std::size_t to = 1 + p.nx * ((y + 1) + p.ny * (z + 1));
            std::memcpy(out.data() + to, src.data() + from, d.nx);
        }
    return MaskVolume(p, std::move(out), vol.spacing(), vol.label());
}

TriangleMesh marching_cubes(const MaskVolume& vol, unsigned workers) {
    if (vol.occupied_count() == 0) {
        throw Error(ErrorCode::EmptyRoi, "mask has no occupied voxels");
    }
    const MaskVolume padded = pad_mask(vol);
    const Grid grid{padded.dims().nx, padded.dims().ny, padded.dims().nz};
    const std::size_t cell_layers = grid.pz - 1;

    std::vector<std::vector<std::uint64_t>> layer_keys(cell_layers);
    detail::parallel_for(cell_layers, workers,
                         [&](std::size_t cz) { scan_layer(padded, grid, cz, layer_keys[cz]); });

    TriangleMesh mesh;
    std::size_t total_keys = 0;
    for (const auto& k : layer_keys) total_keys += k.size();
    mesh.triangles.reserve(total_keys / 3);

    VertexMerger merger(grid, vol.spacing(), mesh);
    for (std::size_t cz = 0; cz < cell_layers; ++cz) {
        const auto& keys = layer_keys[cz];
        if (keys.empty()) continue;
        merger.begin_layer(cz);
        for (std::size_t i = 0; i < keys.size(); i += 3) {
            mesh.triangles.push_back(
                {merger.index_of(keys[i]), merger.index_of(keys[i + 1]), merger.index_of(keys[i + 2])});
        }
    }
    return mesh;
}

void write_off(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    out.precision(17);
    out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
    const auto& v = mesh.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) out << v.x[i] << ' ' << v.y[i] << ' ' << v.z[i] << '\n';
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    auto put_u32 = [&](std::uint32_t v) {
        const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
        out.write(b, 4);
    };
    auto put_f32 = [&](double v) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(bits);
    };

    const char header[80] = "binary STL";
    out.write(header, sizeof header);
    put_u32(static_cast<std::uint32_t>(mesh.triangle_count()));
    const auto& v = mesh.vertices;
    for (const auto& t : mesh.triangles) {
        const std::array<double, 3> a{v.x[t[0]], v.y[t[0]], v.z[t[0]]};
        const std::array<double, 3> b{v.x[t[1]], v.y[t[1]], v.z[t[1]]};
        const std::array<double, 3> c{v.x[t[2]], v.y[t[2]], v.z[t[2]]};
        const std::array<double, 3> u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const std::array<double, 3> w{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        std::array<double, 3> n{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2],
                                u[0] * w[1] - u[1] * w[0]};
        const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        for (double& ni : n) ni = len > 0.0 ? ni / len : 0.0;
        for (double ni : n) put_f32(ni);
        for (const auto* p : {&a, &b, &c})
            for (double pi : *p) put_f32(pi);
        out.write("\0\0", 2);
    }
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

}  // namespace shapecore
