#include <fstream>
#include <random>

#include "doctest.h"
#include "shapecore/error.hpp"
#include "shapecore/npy.hpp"
#include "shapecore/volume.hpp"
#include "test_support.hpp"

using namespace shapecore;
using testing::data_dir;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected shapecore::Error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("load_npy reads numpy-written zero and single-voxel arrays") {
    const auto zeros = load_npy(data_dir() / "zeros_u1.npy");
    CHECK(zeros.dims() == Dims{3, 3, 3});
    CHECK(zeros.occupied_count() == 0);
    CHECK(zeros.spacing() == Spacing{1.0, 1.0, 1.0});

    const auto center = load_npy(data_dir() / "center_u1.npy");
    CHECK(center.occupied_count() == 1);
    CHECK(center.at(1, 1, 1) == 1);

    // Same logical array under other dtypes, a v2.0 header and big-endian storage.
    for (const char* name : {"center_bool.npy", "center_f8.npy", "center_f4_v2.npy", "center_i4_be.npy"}) {
        CAPTURE(name);
        CHECK(load_npy(data_dir() / name) == center);
    }
}

TEST_CASE("load_npy error paths") {
    CHECK(code_of([] { load_npy(data_dir() / "plane_2d.npy"); }) == ErrorCode::NotThreeDimensional);
    CHECK(code_of([] { load_npy(data_dir() / "center_u2.npy"); }) == ErrorCode::UnsupportedDtype);
    CHECK(code_of([] { load_npy(data_dir() / "center_v3.npy"); }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { load_npy(data_dir() / "truncated_u1.npy"); }) == ErrorCode::TruncatedPayload);
    CHECK(code_of([] { load_npy(data_dir() / "does_not_exist.npy"); }) == ErrorCode::IoFailure);

    const std::vector<std::uint8_t> junk{'n', 'o', 't', 'n', 'p', 'y', 1, 0, 0, 0, 0, 0};
    CHECK(code_of([&] { decode_npy(junk); }) == ErrorCode::MalformedHeader);

    auto bytes = encode_npy(testing::single_voxel());
    bytes[12] = '[';  // corrupt the dict opening brace
    CHECK(code_of([&] { decode_npy(bytes); }) == ErrorCode::MalformedHeader);
}

TEST_CASE("C-order and Fortran-order files of one array load identically") {
    const auto c = load_npy(data_dir() / "labels_i2_c.npy");
    const auto f = load_npy(data_dir() / "labels_i2_f.npy");
    CHECK(c.dims() == Dims{4, 3, 2});
    CHECK(c == f);
    CHECK(load_npy(data_dir() / "labels_i8.npy") == c);

    for (std::size_t z = 0; z < 2; ++z)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t x = 0; x < 4; ++x) {
                const int value = static_cast<int>(12 * z + 4 * y + x) % 3;
                CHECK(c.at(x, y, z) == (value != 0 ? 1 : 0));
            }
}

TEST_CASE("explicit label narrows binarization to one value") {
    const auto two = load_npy(data_dir() / "labels_i2_f.npy", 2);
    CHECK(two.label() == 2);
    for (std::size_t z = 0; z < 2; ++z)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t x = 0; x < 4; ++x) {
                const int value = static_cast<int>(12 * z + 4 * y + x) % 3;
                CHECK(two.at(x, y, z) == (value == 2 ? 1 : 0));
            }
    CHECK(load_npy(data_dir() / "labels_i2_c.npy", 7).occupied_count() == 0);
}

TEST_CASE("save_npy round-trips and writes an aligned v1.0 header") {
    testing::TempDir tmp("io");
    std::mt19937 rng(7);
    for (int i = 0; i < 25; ++i) {
        const auto vol = testing::random_blob(rng, 12);
        const auto path = tmp / ("blob" + std::to_string(i) + ".npy");
        save_npy(vol, path);
        const auto back = load_npy(path);
        CHECK(back == vol);
        // Binarization is idempotent on 0/1 data.
        CHECK(load_npy(path) == back);
    }

    const auto bytes = encode_npy(testing::sphere(3.0, 9));
    const auto h = parse_npy_header(bytes);
    CHECK(h.major == 1);
    CHECK(h.minor == 0);
    CHECK(h.payload_offset % 64 == 0);
    CHECK(h.dtype.kind == ElementKind::Unsigned);
    CHECK(h.dtype.size == 1);
    CHECK_FALSE(h.fortran_order);
    CHECK(h.shape == std::vector<std::size_t>{9, 9, 9});

    CHECK(code_of([&] { save_npy(testing::single_voxel(), tmp / "missing-dir" / "x.npy"); }) ==
          ErrorCode::IoFailure);
}

TEST_CASE("attach_spacing") {
    const auto vol = testing::single_voxel();
    CHECK(attach_spacing(vol, {1.0, 1.0, 1.0}) == vol);
    const auto aniso = attach_spacing(vol, {0.5, 0.5, 3.0});
    CHECK(aniso.spacing() == Spacing{0.5, 0.5, 3.0});
    CHECK(std::equal(aniso.data().begin(), aniso.data().end(), vol.data().begin()));

    CHECK(code_of([&] { attach_spacing(vol, {0.0, 1.0, 1.0}); }) == ErrorCode::NonPositiveSpacing);
    CHECK(code_of([&] { attach_spacing(vol, {1.0, -2.0, 1.0}); }) == ErrorCode::NonPositiveSpacing);
    CHECK(code_of([&] { attach_spacing(vol, {1.0, 1.0, std::nan("")}); }) == ErrorCode::NonPositiveSpacing);
    CHECK(code_of([&] { attach_spacing(vol, {1.0, 1.0, INFINITY}); }) == ErrorCode::NonPositiveSpacing);
}

TEST_CASE("synth_mask shapes") {
    ShapeParams p;
    p.radii = {0.5, 0.5, 0.5};
    const auto one = synth_mask(ShapeKind::Sphere, p, {3, 3, 3});
    CHECK(one.occupied_count() == 1);
    CHECK(one.at(1, 1, 1) == 1);

    ShapeParams box;
    box.lo = {1, 1, 1};
    box.hi = {2, 2, 2};
    CHECK(synth_mask(ShapeKind::Box, box, {4, 4, 4}).occupied_count() == 8);

    SUBCASE("sphere r=15 matches an integer brute-force count") {
        p.radii = {15.0, 15.0, 15.0};
        const auto s = synth_mask(ShapeKind::Sphere, p, {40, 40, 40});
        // Centre is 19.5 per axis; compare doubled integer offsets against 2r = 30.
        std::size_t expected = 0;
        for (long z = 0; z < 40; ++z)
            for (long y = 0; y < 40; ++y)
                for (long x = 0; x < 40; ++x) {
                    const long dx = 2 * x - 39, dy = 2 * y - 39, dz = 2 * z - 39;
                    if (dx * dx + dy * dy + dz * dz <= 900) ++expected;
                }
        CHECK(s.occupied_count() == expected);
        const double analytic = 4.0 / 3.0 * M_PI * 15.0 * 15.0 * 15.0;
        CHECK(std::abs(static_cast<double>(s.occupied_count()) - analytic) / analytic < 0.02);
    }

    SUBCASE("ellipsoid") {
        ShapeParams e;
        e.radii = {6.0, 4.0, 2.0};
        e.center = std::array<double, 3>{8.0, 6.0, 4.0};
        const auto v = synth_mask(ShapeKind::Ellipsoid, e, {17, 13, 9});
        std::size_t expected = 0;
        for (int z = 0; z < 9; ++z)
            for (int y = 0; y < 13; ++y)
                for (int x = 0; x < 17; ++x) {
                    // Scaled by (6*4*2)^2 to keep the test in integers.
                    const long a = (x - 8) * 8, b = (y - 6) * 12, c = (z - 4) * 24;
                    if (a * a + b * b + c * c <= 48L * 48L) ++expected;
                }
        CHECK(v.occupied_count() == expected);
        CHECK(v.at(8, 6, 4) == 1);
    }

    SUBCASE("deterministic") {
        p.radii = {5.3, 5.3, 5.3};
        CHECK(synth_mask(ShapeKind::Sphere, p, {14, 14, 14}) == synth_mask(ShapeKind::Sphere, p, {14, 14, 14}));
    }

    SUBCASE("bounds") {
        p.radii = {1.5, 1.5, 1.5};
        CHECK(code_of([&] { synth_mask(ShapeKind::Sphere, p, {4, 4, 4}); }) == ErrorCode::ShapeExceedsBounds);
        box.lo = {0, 1, 1};
        CHECK(code_of([&] { synth_mask(ShapeKind::Box, box, {4, 4, 4}); }) == ErrorCode::ShapeExceedsBounds);
        box.lo = {1, 1, 1};
        box.hi = {3, 2, 2};
        CHECK(code_of([&] { synth_mask(ShapeKind::Box, box, {4, 4, 4}); }) == ErrorCode::ShapeExceedsBounds);
    }
}

TEST_CASE("binarize in-memory arrays") {
    const std::vector<double> values{0, 2, 0, 3, 0, 0, 2, 1};
    const auto any = binarize({2, 2, 2}, values);
    CHECK(any.occupied_count() == 4);
    CHECK(binarize({2, 2, 2}, values, 2).occupied_count() == 2);
    CHECK(code_of([&] { binarize({3, 2, 2}, values); }) == ErrorCode::InvalidArgument);
}
