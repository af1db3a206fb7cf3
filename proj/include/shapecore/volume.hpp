#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shapecore {

/// Voxel extent per axis, x fastest-varying.
struct Dims {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;

    std::size_t count() const noexcept { return nx * ny * nz; }
    bool operator==(const Dims&) const = default;
};

/// Physical step per axis in millimetres.
struct Spacing {
    double sx = 1.0;
    double sy = 1.0;
    double sz = 1.0;

    bool operator==(const Spacing&) const = default;
};

/// Binary region-of-interest volume. Occupancy is stored one byte per voxel
/// (0 or 1) at index x + nx * (y + ny * z). Immutable once constructed.
class MaskVolume {
public:
    MaskVolume() = default;

    /// Takes ownership of `data`; every element must already be 0 or 1.
    MaskVolume(Dims dims, std::vector<std::uint8_t> data, Spacing spacing = {},
               std::optional<std::int64_t> label = std::nullopt);

    const Dims& dims() const noexcept { return dims_; }
    const Spacing& spacing() const noexcept { return spacing_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::optional<std::int64_t> label() const noexcept { return label_; }

    std::uint8_t at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
        return data_[x + dims_.nx * (y + dims_.ny * z)];
    }

    std::size_t occupied_count() const noexcept;

    bool operator==(const MaskVolume&) const = default;

private:
    Dims dims_;
    Spacing spacing_;
    std::vector<std::uint8_t> data_;
    std::optional<std::int64_t> label_;
};

/// Returns a copy of `vol` carrying `spacing`. Throws NonPositiveSpacing
/// unless every component is finite and > 0.
MaskVolume attach_spacing(const MaskVolume& vol, Spacing spacing);

enum class ShapeKind { Sphere, Ellipsoid, Box };

/// Geometry for synth_mask, in voxel units. `center` defaults to the grid
/// centre ((n - 1) / 2 per axis). Sphere uses radii[0]; ellipsoid uses all
/// three semi-axes; box uses the inclusive index ranges lo..hi.
struct ShapeParams {
    std::optional<std::array<double, 3>> center;
    std::array<double, 3> radii{0.0, 0.0, 0.0};
    std::array<std::size_t, 3> lo{0, 0, 0};
    std::array<std::size_t, 3> hi{0, 0, 0};
};

/// A voxel is occupied iff its centre satisfies the shape inequality. The
/// shape must leave one voxel of background on every face (ShapeExceedsBounds).
MaskVolume synth_mask(ShapeKind kind, const ShapeParams& params, Dims dims);

}  // namespace shapecore
