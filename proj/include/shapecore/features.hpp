#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shapecore/mesh.hpp"
#include "shapecore/timing.hpp"

namespace shapecore {

struct BackendSelection;

struct ShapeFeatures {
    double mesh_volume = 0.0;
    double surface_area = 0.0;
    double max_3d_diameter = 0.0;
    double max_2d_diameter_xy = 0.0;
    double max_2d_diameter_xz = 0.0;
    double max_2d_diameter_yz = 0.0;
    std::size_t vertex_count = 0;

    bool operator==(const ShapeFeatures&) const = default;
};

struct Diameters {
    double max_3d = 0.0;
    double xy = 0.0;  // pairs sharing z
    double xz = 0.0;  // pairs sharing y
    double yz = 0.0;  // pairs sharing x

    bool operator==(const Diameters&) const = default;
};

/// Fixed-shape pairwise summation. The tree depends only on values.size(),
/// so equal inputs always round identically.
double pairwise_sum(std::span<const double> values) noexcept;

double surface_area(const TriangleMesh& mesh);
double surface_area_parallel(const TriangleMesh& mesh, unsigned workers);

/// |sum of A . (B x C) / 6|, absolute value taken once at the end.
double mesh_volume(const TriangleMesh& mesh);
double mesh_volume_parallel(const TriangleMesh& mesh, unsigned workers);

/// Signed sum before the absolute value; positive for outward winding.
double signed_mesh_volume(const TriangleMesh& mesh);

/// Brute-force maxima over all unordered vertex pairs. Planar maxima only
/// consider pairs whose out-of-plane coordinate is bit-identical; a plane
/// with no such pair reports 0. Throws NoVertices on an empty set.
Diameters diameters(VertexView vertices);

/// Same contract as diameters(); rows are split into blocks claimed by
/// `workers` threads, each keeping private maxima merged at the end.
Diameters diameters_parallel(VertexView vertices, unsigned workers);

struct FeatureResult {
    ShapeFeatures features;
    StageTimings timings;
};

/// Marching Cubes followed by area, volume and diameters on the selected
/// backend. file_read_ms is left at 0; total_ms covers this call.
FeatureResult extract_features(const MaskVolume& vol, const BackendSelection& backend);

/// JSON object with the seven documented keys.
std::string to_json(const ShapeFeatures& features, int indent = 2);

}  // namespace shapecore
