#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shapecore/volume.hpp"

namespace shapecore {

/// Vertex coordinates in millimetres, one contiguous array per axis.
struct VertexArrays {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;

    std::size_t size() const noexcept { return x.size(); }
    bool operator==(const VertexArrays&) const = default;
};

/// Read-only view over SoA coordinates; the diameter kernels take this.
struct VertexView {
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> z;

    std::size_t size() const noexcept { return x.size(); }
};

struct TriangleMesh {
    VertexArrays vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    std::size_t vertex_count() const noexcept { return vertices.size(); }
    std::size_t triangle_count() const noexcept { return triangles.size(); }
    VertexView view() const noexcept { return {vertices.x, vertices.y, vertices.z}; }

    bool operator==(const TriangleMesh&) const = default;
};

/// Edge e of the case table joins corners kEdgeCorners[e][0] and [1].
/// Corner c sits at offset kCornerOffsets[c] from the cell origin.
inline constexpr std::array<std::array<int, 3>, 8> kCornerOffsets{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
}};

inline constexpr std::array<std::array<int, 2>, 12> kEdgeCorners{{
    {0, 1}, {1, 2}, {3, 2}, {0, 3},
    {4, 5}, {5, 6}, {7, 6}, {4, 7},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

/// Rows of edge indices, three per triangle, terminated by -1. Bit c of the
/// case index is set when corner c is below the iso-level (background).
using CaseTable = std::array<std::array<std::int8_t, 16>, 256>;

const CaseTable& case_table() noexcept;

/// Number of triangles emitted for a case index.
int case_triangle_count(std::uint8_t cube_index) noexcept;

/// One layer of background on every face, spacing preserved.
MaskVolume pad_mask(const MaskVolume& vol);

/// Iso-level 0.5 surface of the mask. Vertices sit on grid-edge midpoints,
/// keyed by (grid point, axis) so shared edges map to one vertex. Coordinates
/// are expressed in the unpadded volume frame: voxel (i, j, k) has its centre
/// at (i * sx, j * sy, k * sz). Output order is canonical regardless of
/// `workers`. Throws EmptyRoi when nothing is occupied.
TriangleMesh marching_cubes(const MaskVolume& vol, unsigned workers = 1);

void write_off(const TriangleMesh& mesh, const std::filesystem::path& path);
void write_stl(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace shapecore
