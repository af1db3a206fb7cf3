#include "shapecore/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shapecore/error.hpp"

namespace shapecore {

namespace {

void check_spacing(const Spacing& s) {
    for (double v : {s.sx, s.sy, s.sz}) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw Error(ErrorCode::NonPositiveSpacing,
                        "spacing components must be finite and > 0, got " + std::to_string(v));
        }
    }
}

}  // namespace

MaskVolume::MaskVolume(Dims dims, std::vector<std::uint8_t> data, Spacing spacing,
                       std::optional<std::int64_t> label)
    : dims_(dims), spacing_(spacing), data_(std::move(data)), label_(label) {
    if (dims_.nx == 0 || dims_.ny == 0 || dims_.nz == 0) {
        throw Error(ErrorCode::InvalidArgument, "every extent must be >= 1");
    }
    if (data_.size() != dims_.count()) {
        throw Error(ErrorCode::InvalidArgument, "data length does not match dims");
    }
    if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw Error(ErrorCode::InvalidArgument, "occupancy must be 0 or 1");
    }
    check_spacing(spacing_);
}

std::size_t MaskVolume::occupied_count() const noexcept {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

MaskVolume attach_spacing(const MaskVolume& vol, Spacing spacing) {
    check_spacing(spacing);
    std::vector<std::uint8_t> data(vol.data().begin(), vol.data().end());
    return MaskVolume(vol.dims(), std::move(data), spacing, vol.label());
}

MaskVolume synth_mask(ShapeKind kind, const ShapeParams& params, Dims dims) {
    if (dims.nx == 0 || dims.ny == 0 || dims.nz == 0) {
        throw Error(ErrorCode::InvalidArgument, "every extent must be >= 1");
    }
    const std::array<std::size_t, 3> n{dims.nx, dims.ny, dims.nz};
    std::array<double, 3> c{};
    for (int a = 0; a < 3; ++a) {
        c[a] = params.center ? (*params.center)[a] : (static_cast<double>(n[a]) - 1.0) / 2.0;
    }

    std::vector<std::uint8_t> data(dims.count(), 0);
    auto index = [&](std::size_t x, std::size_t y, std::size_t z) {
        return x + dims.nx * (y + dims.ny * z);
    };

    if (kind == ShapeKind::Box) {
        for (int a = 0; a < 3; ++a) {
            if (params.lo[a] > params.hi[a]) {
                throw Error(ErrorCode::InvalidArgument, "box lo must not exceed hi");
            }
            if (params.lo[a] < 1 || params.hi[a] + 2 > n[a]) {
                throw Error(ErrorCode::ShapeExceedsBounds, "box touches the volume boundary");
            }
        }
        for (std::size_t z = params.lo[2]; z <= params.hi[2]; ++z)
            for (std::size_t y = params.lo[1]; y <= params.hi[1]; ++y)
                for (std::size_t x = params.lo[0]; x <= params.hi[0]; ++x) data[index(x, y, z)] = 1;
        return MaskVolume(dims, std::move(data));
    }

    std::array<double, 3> r{};
    if (kind == ShapeKind::Sphere) {
        r.fill(params.radii[0]);
    } else {
        r = params.radii;
    }
    for (int a = 0; a < 3; ++a) {
        if (!std::isfinite(r[a]) || !(r[a] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "radii must be finite and > 0");
        }
        // Occupied indices satisfy |i - c| <= r, so the extremes are
        // ceil(c - r) and floor(c + r); both must stay off the outer layer.
        if (!(c[a] - r[a] > 0.0) || !(c[a] + r[a] < static_cast<double>(n[a]) - 1.0)) {
            throw Error(ErrorCode::ShapeExceedsBounds,
                        "shape needs one voxel of background on every face");
        }
    }

    // Spheres compare squared distance against r^2 directly so the boundary
    // matches the |c - centre| <= r definition without a division.
    const bool sphere = kind == ShapeKind::Sphere;
    const std::array<double, 3> scale = sphere ? std::array<double, 3>{1.0, 1.0, 1.0}
                                               : std::array<double, 3>{r[0], r[1], r[2]};
    const double limit = sphere ? r[0] * r[0] : 1.0;
    for (std::size_t z = 0; z < dims.nz; ++z) {
        const double dz = (static_cast<double>(z) - c[2]) / scale[2];
        for (std::size_t y = 0; y < dims.ny; ++y) {
            const double dy = (static_cast<double>(y) - c[1]) / scale[1];
            for (std::size_t x = 0; x < dims.nx; ++x) {
                const double dx = (static_cast<double>(x) - c[0]) / scale[0];
                if (dx * dx + dy * dy + dz * dz <= limit) data[index(x, y, z)] = 1;
            }
        }
    }
    return MaskVolume(dims, std::move(data));
}

}  // namespace shapecore
