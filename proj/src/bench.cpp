#include "shapecore/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "shapecore/error.hpp"

namespace shapecore {

namespace {

constexpr const char* kRecordHeader =
    "case_id\tinput_bytes\tvertex_count\tbackend\trepeat\tfile_read_ms\tmesh_ms\tdiameters_ms\ttotal_ms";
constexpr const char* kSpeedupHeader =
    "case_id\tvertex_count\tbaseline\tbackend\tbaseline_comp_ms\tcandidate_comp_ms\tcomp_speedup\t"
    "baseline_total_ms\tcandidate_total_ms\toverall_speedup\tcandidate_spread";
constexpr const char* kLogLogHeader = "vertex_count\tmedian_total_ms\tbackend\tcase_id\trel_spread";
constexpr const char* kMissing = "NA";

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

double ratio(double baseline, double candidate) {
    if (candidate > 0.0) return baseline / candidate;
    return baseline > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
    if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& cell, std::size_t line_no) {
    std::istringstream in(cell);
    T v{};
    in >> v;
    if (!in || in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorCode::MalformedHeader,
                    "bad numeric cell '" + cell + "' on line " + std::to_string(line_no));
    }
    return v;
}

struct Group {
    std::size_t vertex_count = 0;
    std::vector<double> comp;
    std::vector<double> total;
};

// case_id -> backend -> successful runs
using Grouped = std::map<std::string, std::map<std::string, Group>>;

Grouped group_records(const std::vector<BenchRecord>& records) {
    Grouped g;
    for (const auto& r : records) {
        if (r.failed()) continue;
        auto& grp = g[r.case_id][r.backend];
        grp.vertex_count = r.vertex_count;
        grp.comp.push_back(r.timings.mesh_ms + r.timings.diameters_ms);
        grp.total.push_back(r.timings.total_ms);
    }
    return g;
}

}  // namespace

std::vector<std::filesystem::path> list_cases(const std::filesystem::path& dataset_dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dataset_dir, ec)) {
        throw Error(ErrorCode::NoCasesFound, "'" + dataset_dir.string() + "' is not a directory");
    }
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".npy") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

std::vector<BenchRecord> bench_run(const std::filesystem::path& dataset_dir, const BenchConfig& config) {
    if (config.repeats == 0) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
    if (config.backends.empty()) throw Error(ErrorCode::InvalidArgument, "no backends requested");
    const auto cases = list_cases(dataset_dir);
    if (cases.empty()) {
        throw Error(ErrorCode::NoCasesFound, "no .npy masks in '" + dataset_dir.string() + "'");
    }

    std::vector<BackendSelection> selections;
    for (auto req : config.backends) selections.push_back(resolve_backend(req, config.workers));

    std::vector<BenchRecord> records;
    for (const auto& path : cases) {
        const std::string case_id = path.stem().string();
        std::error_code ec;
        const auto size = std::filesystem::file_size(path, ec);
        const std::uint64_t input_bytes = ec ? 0 : static_cast<std::uint64_t>(size);

        for (const auto& sel : selections) {
            BenchRecord base;
            base.case_id = case_id;
            base.input_bytes = input_bytes;
            base.backend = std::string(to_string(sel.resolved));
            try {
                for (std::size_t w = 0; w < config.warmups; ++w) {
                    (void)run_pipeline(path, config.spacing, sel, config.label);
                }
                for (std::size_t rep = 0; rep < config.repeats; ++rep) {
                    const PipelineResult r = run_pipeline(path, config.spacing, sel, config.label);
                    BenchRecord rec = base;
                    rec.vertex_count = r.features.vertex_count;
                    rec.repeat_index = rep;
                    rec.timings = r.timings;
                    records.push_back(std::move(rec));
                }
            } catch (const Error& e) {
                // Drop partial repeats so a case is either complete or one failed row.
                std::erase_if(records, [&](const BenchRecord& r) {
                    return r.case_id == case_id && r.backend == base.backend && !r.failed();
                });
                BenchRecord rec = base;
                rec.error = e.what();
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double relative_spread(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double m = median(values);
    return m > 0.0 ? (*hi - *lo) / m : 0.0;
}

std::vector<SpeedupRow> speedup_table(const std::vector<BenchRecord>& records,
                                      const std::string& baseline) {
    std::vector<SpeedupRow> rows;
    std::map<std::string, bool> seen_case;
    for (const auto& r : records) seen_case[r.case_id] = true;

    const Grouped grouped = group_records(records);
    for (const auto& [case_id, _] : seen_case) {
        const auto by_case = grouped.find(case_id);
        const Group* base = nullptr;
        if (by_case != grouped.end()) {
            auto it = by_case->second.find(baseline);
            if (it != by_case->second.end()) base = &it->second;
        }
        if (base == nullptr) {
            throw Error(ErrorCode::MissingBaseline,
                        "case '" + case_id + "' has no successful '" + baseline + "' runs");
        }
        const double base_comp = median(base->comp);
        const double base_total = median(base->total);

        auto emit = [&](const std::string& backend, const Group& cand) {
            SpeedupRow row;
            row.case_id = case_id;
            row.vertex_count = base->vertex_count;
            row.baseline = baseline;
            row.backend = backend;
            row.baseline_comp_ms = base_comp;
            row.candidate_comp_ms = median(cand.comp);
            row.comp_speedup = ratio(base_comp, row.candidate_comp_ms);
            row.baseline_total_ms = base_total;
            row.candidate_total_ms = median(cand.total);
            row.overall_speedup = ratio(base_total, row.candidate_total_ms);
            row.candidate_spread = relative_spread(cand.total);
            rows.push_back(std::move(row));
        };

        const auto& backends = by_case->second;
        if (backends.size() == 1) {
            emit(baseline, *base);
            continue;
        }
        for (const auto& [backend, grp] : backends) {
            if (backend != baseline) emit(backend, grp);
        }
    }
    return rows;
}

std::vector<LogLogRow> loglog_rows(const std::vector<BenchRecord>& records) {
    std::vector<LogLogRow> rows;
    for (const auto& [case_id, backends] : group_records(records)) {
        for (const auto& [backend, grp] : backends) {
            rows.push_back({grp.vertex_count, median(grp.total), backend, case_id,
                            relative_spread(grp.total)});
        }
    }
    if (rows.empty()) throw Error(ErrorCode::NoRecords, "no successful bench records");
    std::stable_sort(rows.begin(), rows.end(), [](const LogLogRow& a, const LogLogRow& b) {
        return a.vertex_count < b.vertex_count;
    });
    return rows;
}

void write_tsv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << kRecordHeader << '\n';
    for (const auto& r : records) {
        out << r.case_id << '\t' << r.input_bytes << '\t' << r.vertex_count << '\t' << r.backend << '\t'
            << r.repeat_index;
        if (r.failed()) {
            for (int i = 0; i < 4; ++i) out << '\t' << kMissing;
        } else {
            out << '\t' << fixed3(r.timings.file_read_ms) << '\t' << fixed3(r.timings.mesh_ms) << '\t'
                << fixed3(r.timings.diameters_ms) << '\t' << fixed3(r.timings.total_ms);
        }
        out << '\n';
    }
}

void write_tsv(std::ostream& out, const std::vector<SpeedupRow>& rows) {
    out << kSpeedupHeader << '\n';
    for (const auto& r : rows) {
        out << r.case_id << '\t' << r.vertex_count << '\t' << r.baseline << '\t' << r.backend << '\t'
            << fixed3(r.baseline_comp_ms) << '\t' << fixed3(r.candidate_comp_ms) << '\t'
            << fixed3(r.comp_speedup) << '\t' << fixed3(r.baseline_total_ms) << '\t'
            << fixed3(r.candidate_total_ms) << '\t' << fixed3(r.overall_speedup) << '\t'
            << fixed3(r.candidate_spread) << '\n';
    }
}

void write_tsv(std::ostream& out, const std::vector<LogLogRow>& rows) {
    out << kLogLogHeader << '\n';
    for (const auto& r : rows) {
        out << r.vertex_count << '\t' << fixed3(r.median_total_ms) << '\t' << r.backend << '\t'
            << r.case_id << '\t' << fixed3(r.spread) << '\n';
    }
}

void emit_tsv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_tsv(out, records);
    check_written(out, path);
}

void emit_tsv(const std::vector<SpeedupRow>& rows, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_tsv(out, rows);
    check_written(out, path);
}

void emit_loglog(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
    if (records.empty()) throw Error(ErrorCode::NoRecords, "no bench records");
    const auto rows = loglog_rows(records);
    auto out = open_out(path);
    write_tsv(out, rows);
    check_written(out, path);
}

std::vector<BenchRecord> parse_tsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRecordHeader) {
        throw Error(ErrorCode::MalformedHeader, "bench TSV header does not match the expected columns");
    }
    std::vector<BenchRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_tabs(line);
        if (cells.size() != 9) {
            throw Error(ErrorCode::MalformedHeader, "expected 9 columns on line " + std::to_string(line_no));
        }
        BenchRecord r;
        r.case_id = cells[0];
        r.input_bytes = parse_number<std::uint64_t>(cells[1], line_no);
        r.vertex_count = parse_number<std::size_t>(cells[2], line_no);
        r.backend = cells[3];
        r.repeat_index = parse_number<std::size_t>(cells[4], line_no);
        if (cells[5] == kMissing) {
            r.error = "failed";
        } else {
            r.timings.file_read_ms = parse_number<double>(cells[5], line_no);
            r.timings.mesh_ms = parse_number<double>(cells[6], line_no);
            r.timings.diameters_ms = parse_number<double>(cells[7], line_no);
            r.timings.total_ms = parse_number<double>(cells[8], line_no);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<BenchRecord> read_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
    return parse_tsv(in);
}

}  // namespace shapecore
