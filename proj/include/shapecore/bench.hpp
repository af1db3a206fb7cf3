#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shapecore/dispatch.hpp"
#include "shapecore/timing.hpp"
#include "shapecore/volume.hpp"

namespace shapecore {

struct BenchRecord {
    std::string case_id;
    std::uint64_t input_bytes = 0;
    std::size_t vertex_count = 0;
    std::string backend;  // resolved backend label ("seq" / "par")
    std::size_t repeat_index = 0;
    StageTimings timings;
    /// Set when the case failed to load or extract; timing cells become NA.
    std::optional<std::string> error;

    bool failed() const noexcept { return error.has_value(); }
};

struct BenchConfig {
    Spacing spacing;
    std::vector<BackendRequest> backends{BackendRequest::Sequential, BackendRequest::Parallel};
    std::size_t repeats = 5;
    std::size_t warmups = 1;
    std::optional<unsigned> workers;
    std::optional<std::int64_t> label;
};

/// Every *.npy under `dataset_dir`, sorted by file name.
std::vector<std::filesystem::path> list_cases(const std::filesystem::path& dataset_dir);

/// Runs each case under each backend `warmups` times untimed, then `repeats`
/// timed runs, strictly one run at a time. A case that fails yields one
/// failed record per backend and the run moves on. NoCasesFound when the
/// directory has no masks.
std::vector<BenchRecord> bench_run(const std::filesystem::path& dataset_dir,
                                   const BenchConfig& config);

/// Median, with the two middle values averaged for even sizes.
double median(std::vector<double> values);

/// (max - min) / median; 0 for an empty sample or zero median.
double relative_spread(const std::vector<double>& values);

struct SpeedupRow {
    std::string case_id;
    std::size_t vertex_count = 0;
    std::string baseline;
    std::string backend;
    double baseline_comp_ms = 0.0;
    double candidate_comp_ms = 0.0;
    double comp_speedup = 0.0;
    double baseline_total_ms = 0.0;
    double candidate_total_ms = 0.0;
    double overall_speedup = 0.0;
    double candidate_spread = 0.0;
};

/// comp = (mesh + diameters), overall = total; both as median ratios of
/// baseline over candidate. One row per case per non-baseline backend (and a
/// baseline-vs-itself row when it is the only backend). MissingBaseline when
/// a case has no successful baseline records.
std::vector<SpeedupRow> speedup_table(const std::vector<BenchRecord>& records,
                                      const std::string& baseline);

struct LogLogRow {
    std::size_t vertex_count = 0;
    double median_total_ms = 0.0;
    std::string backend;
    std::string case_id;
    double spread = 0.0;
};

/// Per case per backend, sorted by vertex count (ties by case then backend).
/// NoRecords when nothing succeeded.
std::vector<LogLogRow> loglog_rows(const std::vector<BenchRecord>& records);

void write_tsv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_tsv(std::ostream& out, const std::vector<SpeedupRow>& rows);
void write_tsv(std::ostream& out, const std::vector<LogLogRow>& rows);

void emit_tsv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
void emit_tsv(const std::vector<SpeedupRow>& rows, const std::filesystem::path& path);
void emit_loglog(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

/// Inverse of write_tsv for bench records. Throws MalformedHeader on a
/// header or row that does not match the fixed column layout.
std::vector<BenchRecord> parse_tsv(std::istream& in);
std::vector<BenchRecord> read_tsv(const std::filesystem::path& path);

}  // namespace shapecore
