#include <fstream>
#include <sstream>

#include "doctest.h"
#include "shapecore/bench.hpp"
#include "shapecore/error.hpp"
#include "shapecore/npy.hpp"
#include "test_support.hpp"

using namespace shapecore;

namespace {

BenchRecord record(const std::string& case_id, const std::string& backend, double mesh, double diam,
                   double total, std::size_t vertices = 10, std::size_t rep = 0) {
    BenchRecord r;
    r.case_id = case_id;
    r.input_bytes = 128;
    r.vertex_count = vertices;
    r.backend = backend;
    r.repeat_index = rep;
    r.timings = {0.5, mesh, diam, total};
    return r;
}

std::string to_text(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    write_tsv(out, records);
    return out.str();
}

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

TEST_CASE("median and spread") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(median({}) == 0.0);
    CHECK(relative_spread({1.0, 2.0, 3.0}) == 1.0);
    CHECK(relative_spread({}) == 0.0);
}

TEST_CASE("bench_run counts, ordering and vertex counts") {
    testing::TempDir tmp("bench");
    save_npy(testing::single_voxel(), tmp / "b_one.npy");
    save_npy(testing::sphere(3.0, 9), tmp / "a_sphere.npy");
    save_npy(testing::sphere(2.0, 7), tmp / "c_small.npy");

    BenchConfig cfg;
    cfg.repeats = 5;
    cfg.warmups = 1;
    cfg.workers = 2;
    const auto records = bench_run(tmp.path(), cfg);
    CHECK(records.size() == 30);
    CHECK(records.front().case_id == "a_sphere");
    CHECK(records.back().case_id == "c_small");

    for (const auto& r : records) {
        CHECK_FALSE(r.failed());
        CHECK(r.input_bytes == std::filesystem::file_size(tmp / (r.case_id + ".npy")));
        CHECK(r.timings.mesh_ms >= 0.0);
        CHECK(r.timings.diameters_ms >= 0.0);
        CHECK(r.timings.file_read_ms >= 0.0);
        CHECK(r.timings.total_ms >= r.timings.mesh_ms + r.timings.diameters_ms);
        if (r.case_id == "b_one") CHECK(r.vertex_count == 6);
        CHECK(r.repeat_index < 5);
    }
    // Non-timing fields agree across repeats and backends.
    for (const auto& r : records)
        for (const auto& s : records)
            if (r.case_id == s.case_id) CHECK(r.vertex_count == s.vertex_count);
}

TEST_CASE("bench_run error handling") {
    testing::TempDir tmp("bench-err");
    CHECK(code_of([&] { bench_run(tmp.path(), {}); }) == ErrorCode::NoCasesFound);
    CHECK(code_of([&] { bench_run(tmp / "nope", {}); }) == ErrorCode::NoCasesFound);

    save_npy(testing::single_voxel(), tmp / "good.npy");
    save_npy(MaskVolume({3, 3, 3}, std::vector<std::uint8_t>(27, 0)), tmp / "empty.npy");
    std::ofstream(tmp / "junk.npy") << "this is not an npy file";

    BenchConfig cfg;
    cfg.repeats = 3;
    cfg.warmups = 0;
    cfg.backends = {BackendRequest::Sequential};
    const auto records = bench_run(tmp.path(), cfg);
    REQUIRE(records.size() == 5);
    CHECK(records[0].case_id == "empty");
    CHECK(records[0].failed());
    CHECK(records[1].case_id == "good");
    CHECK(records[4].case_id == "junk");
    CHECK(records[4].failed());

    cfg.repeats = 0;
    CHECK(code_of([&] { bench_run(tmp.path(), cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("speedup_table") {
    SUBCASE("identity") {
        const std::vector<BenchRecord> recs{record("c", "seq", 1, 9, 12), record("c", "seq", 2, 8, 14, 10, 1),
                                            record("c", "seq", 3, 7, 13, 10, 2)};
        const auto rows = speedup_table(recs, "seq");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].comp_speedup == 1.0);
        CHECK(rows[0].overall_speedup == 1.0);
    }
    SUBCASE("arithmetic") {
        const std::vector<BenchRecord> recs{record("c", "seq", 0, 100, 120), record("c", "par", 0, 10, 30)};
        const auto rows = speedup_table(recs, "seq");
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].backend == "par");
        CHECK(rows[0].comp_speedup == 10.0);
        CHECK(rows[0].overall_speedup == 4.0);
    }
    SUBCASE("medians, not means") {
        std::vector<BenchRecord> recs;
        for (double d : {100.0, 100.0, 1000.0}) recs.push_back(record("c", "seq", 0, d, d));
        for (double d : {50.0, 50.0, 1.0}) recs.push_back(record("c", "par", 0, d, d));
        const auto rows = speedup_table(recs, "seq");
        CHECK(rows[0].comp_speedup == 2.0);
    }
    SUBCASE("missing baseline") {
        const std::vector<BenchRecord> recs{record("a", "seq", 1, 1, 3), record("b", "par", 1, 1, 3)};
        CHECK(code_of([&] { speedup_table(recs, "seq"); }) == ErrorCode::MissingBaseline);
    }
}

TEST_CASE("TSV emission") {
    testing::TempDir tmp("tsv");
    SUBCASE("one record is two lines") {
        emit_tsv(std::vector<BenchRecord>{record("c", "seq", 1.23456, 2, 3.5)}, tmp / "r.tsv");
        std::ifstream in(tmp / "r.tsv");
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(all ==
              "case_id\tinput_bytes\tvertex_count\tbackend\trepeat\tfile_read_ms\tmesh_ms\tdiameters_ms\ttotal_ms\n"
              "c\t128\t10\tseq\t0\t0.500\t1.235\t2.000\t3.500\n");
    }
    SUBCASE("parse reproduces values to three decimals and re-emits identically") {
        std::vector<BenchRecord> recs{record("x", "seq", 0.0004, 1234.5678, 99999.9999, 236588, 4),
                                      record("y", "par", 1.0 / 3.0, 2.0 / 3.0, 7.0)};
        BenchRecord failed = record("z", "par", 0, 0, 0, 0);
        failed.error = "EmptyRoi";
        recs.push_back(failed);

        const std::string first = to_text(recs);
        std::istringstream in(first);
        const auto parsed = parse_tsv(in);
        REQUIRE(parsed.size() == 3);
        CHECK(parsed[0].vertex_count == 236588);
        CHECK(parsed[0].repeat_index == 4);
        CHECK(parsed[0].timings.diameters_ms == doctest::Approx(1234.568).epsilon(1e-12));
        CHECK(parsed[1].timings.mesh_ms == doctest::Approx(0.333).epsilon(1e-12));
        CHECK(parsed[2].failed());
        CHECK(to_text(parsed) == first);
    }
    SUBCASE("malformed input") {
        std::istringstream bad_header("case\tfoo\n");
        CHECK(code_of([&] { parse_tsv(bad_header); }) == ErrorCode::MalformedHeader);
        std::istringstream short_row(to_text({}) + "a\t1\t2\n");
        CHECK(code_of([&] { parse_tsv(short_row); }) == ErrorCode::MalformedHeader);
        CHECK(code_of([&] { emit_tsv(std::vector<BenchRecord>{}, tmp / "no" / "r.tsv"); }) == ErrorCode::IoFailure);
    }
}

TEST_CASE("log-log plot data") {
    std::vector<BenchRecord> recs{record("big", "seq", 1, 90, 100, 5000), record("big", "par", 1, 9, 20, 5000),
                                  record("small", "seq", 1, 2, 4, 300), record("small", "par", 1, 1, 3, 300)};
    const auto rows = loglog_rows(recs);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].vertex_count == 300);
    CHECK(rows[3].vertex_count == 5000);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].vertex_count <= rows[i].vertex_count);

    const auto one_case = loglog_rows({recs[0], recs[1]});
    CHECK(one_case.size() == 2);

    CHECK(code_of([] { loglog_rows({}); }) == ErrorCode::NoRecords);
    testing::TempDir tmp("loglog");
    CHECK(code_of([&] { emit_loglog({}, tmp / "p.tsv"); }) == ErrorCode::NoRecords);
    emit_loglog(recs, tmp / "p.tsv");
    std::ifstream in(tmp / "p.tsv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "vertex_count\tmedian_total_ms\tbackend\tcase_id\trel_spread");
    CHECK(first.rfind("300\t", 0) == 0);
}
