#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapecore/volume.hpp"

namespace shapecore {

enum class ElementKind { Bool, Unsigned, Signed, Float };

struct NpyDtype {
    ElementKind kind = ElementKind::Unsigned;
    std::size_t size = 1;
    bool big_endian = false;
};

struct NpyHeader {
    std::uint8_t major = 1;
    std::uint8_t minor = 0;
    NpyDtype dtype;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
    /// Offset of the first payload byte from the start of the file.
    std::size_t payload_offset = 0;

    std::size_t element_count() const noexcept;
};

/// Parses the preamble and header dict of an NPY v1.0/v2.0 buffer.
/// Rejects anything else with MalformedHeader / UnsupportedDtype.
NpyHeader parse_npy_header(std::span<const std::uint8_t> bytes);

/// Decodes a full NPY buffer into a canonical mask. Axis 0 of the array maps
/// to z and axis 2 to x; Fortran-order payloads are transposed. With a label,
/// elements equal to it become 1; without one, any nonzero element does.
MaskVolume decode_npy(std::span<const std::uint8_t> bytes,
                      std::optional<std::int64_t> label = std::nullopt);

MaskVolume load_npy(const std::filesystem::path& path,
                    std::optional<std::int64_t> label = std::nullopt);

/// Version 1.0, '|u1', C-order.
std::vector<std::uint8_t> encode_npy(const MaskVolume& vol);

void save_npy(const MaskVolume& vol, const std::filesystem::path& path);

/// Binarizes an in-memory C-order array of shape (nz, ny, nx).
MaskVolume binarize(Dims dims, std::span<const double> values,
                    std::optional<std::int64_t> label = std::nullopt);

}  // namespace shapecore
