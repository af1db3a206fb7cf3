// shapecore command-line front end: extract, bench, speedup, plotdata, synth.

#include <array>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shapecore/bench.hpp"
#include "shapecore/dispatch.hpp"
#include "shapecore/error.hpp"
#include "shapecore/mesh.hpp"
#include "shapecore/npy.hpp"
#include "shapecore/volume.hpp"

namespace sc = shapecore;

namespace {

enum ExitCode : int { kOk = 0, kInputError = 2, kEmptyRoi = 3, kBenchConfig = 4 };

template <typename T>
std::array<T, 3> parse_triple(const std::string& text, const char* what) {
    std::array<T, 3> out{};
    std::stringstream in(text);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(in, cell, ',')) {
        if (i == 3) break;
        std::stringstream cs(cell);
        if (!(cs >> out[i]) || !cs.eof()) i = 4;
        ++i;
    }
    if (i != 3 || !in.eof()) {
        throw sc::Error(sc::ErrorCode::InvalidArgument,
                        std::string(what) + " expects three comma-separated values, got '" + text + "'");
    }
    return out;
}

sc::Spacing parse_spacing(const std::string& text) {
    const auto s = parse_triple<double>(text, "--spacing");
    return {s[0], s[1], s[2]};
}

std::vector<sc::BackendRequest> parse_backend_list(const std::string& text) {
    std::vector<sc::BackendRequest> out;
    std::stringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(sc::parse_backend_request(cell));
    if (out.empty()) throw sc::Error(sc::ErrorCode::InvalidArgument, "--backends is empty");
    return out;
}

void report_fallback(const sc::BackendSelection& sel) {
    if (sel.fallback_reason) {
        std::cerr << "shapecore: requested backend '" << sc::to_string(sel.requested) << "' resolved to '"
                  << sc::to_string(sel.resolved) << "': " << *sel.fallback_reason << '\n';
    }
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int exit_code_for(const sc::Error& e, bool bench_context) {
    switch (e.code()) {
        case sc::ErrorCode::EmptyRoi: return kEmptyRoi;
        case sc::ErrorCode::NoCasesFound:
        case sc::ErrorCode::MissingBaseline:
        case sc::ErrorCode::NoRecords: return kBenchConfig;
        case sc::ErrorCode::InvalidArgument: return bench_context ? kBenchConfig : kInputError;
        default: return kInputError;
    }
}

struct ExtractArgs {
    std::string mask;
    std::string spacing = "1,1,1";
    std::string backend = "auto";
    std::optional<unsigned> workers;
    std::optional<std::int64_t> label;
    bool json = false;
    bool tsv = false;
    std::string dump_mesh;
};

int run_extract(const ExtractArgs& a) {
    const sc::Spacing spacing = parse_spacing(a.spacing);
    const auto sel = sc::resolve_backend(sc::parse_backend_request(a.backend), a.workers);
    report_fallback(sel);
    const auto result = sc::run_pipeline(a.mask, spacing, sel, a.label);

    if (!a.dump_mesh.empty()) {
        const auto vol = sc::attach_spacing(sc::load_npy(a.mask, a.label), spacing);
        const auto mesh = sc::marching_cubes(vol, sel.worker_count);
        const std::filesystem::path out(a.dump_mesh);
        if (out.extension() == ".stl") sc::write_stl(mesh, out);
        else sc::write_off(mesh, out);
    }

    const auto& f = result.features;
    const auto& t = result.timings;
    if (a.json) {
        std::cout << sc::to_json(f) << '\n';
    } else if (a.tsv) {
        std::cout << "MeshVolume\tSurfaceArea\tMaximum3DDiameter\tMaximum2DDiameterXY\t"
                     "Maximum2DDiameterXZ\tMaximum2DDiameterYZ\tVertexCount\tbackend\t"
                     "file_read_ms\tmesh_ms\tdiameters_ms\ttotal_ms\n"
                  << g17(f.mesh_volume) << '\t' << g17(f.surface_area) << '\t' << g17(f.max_3d_diameter)
                  << '\t' << g17(f.max_2d_diameter_xy) << '\t' << g17(f.max_2d_diameter_xz) << '\t'
                  << g17(f.max_2d_diameter_yz) << '\t' << f.vertex_count << '\t'
                  << sc::to_string(result.backend.resolved) << '\t' << t.file_read_ms << '\t' << t.mesh_ms
                  << '\t' << t.diameters_ms << '\t' << t.total_ms << '\n';
    } else {
        std::cout << "MeshVolume           " << g17(f.mesh_volume) << " mm^3\n"
                  << "SurfaceArea          " << g17(f.surface_area) << " mm^2\n"
                  << "Maximum3DDiameter    " << g17(f.max_3d_diameter) << " mm\n"
                  << "Maximum2DDiameterXY  " << g17(f.max_2d_diameter_xy) << " mm\n"
                  << "Maximum2DDiameterXZ  " << g17(f.max_2d_diameter_xz) << " mm\n"
                  << "Maximum2DDiameterYZ  " << g17(f.max_2d_diameter_yz) << " mm\n"
                  << "VertexCount          " << f.vertex_count << '\n'
                  << "backend              " << sc::to_string(result.backend.resolved) << " ("
                  << result.backend.worker_count << " workers)\n";
        if (result.backend.fallback_reason) {
            std::cout << "fallback             " << *result.backend.fallback_reason << '\n';
        }
        std::cout << "timings [ms]         read " << t.file_read_ms << ", mesh " << t.mesh_ms
                  << ", diameters " << t.diameters_ms << ", total " << t.total_ms << '\n';
    }
    return kOk;
}

struct BenchArgs {
    std::string dataset;
    std::string spacing = "1,1,1";
    std::string backends = "seq,par";
    std::size_t repeats = 5;
    std::size_t warmups = 1;
    std::optional<unsigned> workers;
    std::optional<std::int64_t> label;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    sc::BenchConfig cfg;
    cfg.spacing = parse_spacing(a.spacing);
    cfg.backends = parse_backend_list(a.backends);
    cfg.repeats = a.repeats;
    cfg.warmups = a.warmups;
    cfg.workers = a.workers;
    cfg.label = a.label;
    for (auto req : cfg.backends) report_fallback(sc::resolve_backend(req, cfg.workers));

    const auto records = sc::bench_run(a.dataset, cfg);
    for (const auto& r : records) {
        if (r.failed()) std::cerr << "shapecore: case '" << r.case_id << "' failed: " << *r.error << '\n';
    }
    if (a.out.empty()) sc::write_tsv(std::cout, records);
    else sc::emit_tsv(records, a.out);
    return kOk;
}

int run_speedup(const std::string& in, const std::string& baseline, const std::string& out) {
    const auto rows = sc::speedup_table(sc::read_tsv(in), baseline);
    if (out.empty()) sc::write_tsv(std::cout, rows);
    else sc::emit_tsv(rows, out);
    return kOk;
}

int run_plotdata(const std::string& in, const std::string& out) {
    const auto records = sc::read_tsv(in);
    if (out.empty()) sc::write_tsv(std::cout, sc::loglog_rows(records));
    else sc::emit_loglog(records, out);
    return kOk;
}

struct SynthArgs {
    std::string kind;
    std::string dims;
    double radius = 0.0;
    std::string radii;
    std::string center;
    std::string lo;
    std::string hi;
    std::string out;
};

int run_synth(const SynthArgs& a) {
    const auto d = parse_triple<std::size_t>(a.dims, "--dims");
    sc::ShapeParams p;
    if (!a.center.empty()) p.center = parse_triple<double>(a.center, "--center");
    sc::ShapeKind kind;
    if (a.kind == "sphere") {
        kind = sc::ShapeKind::Sphere;
        p.radii = {a.radius, a.radius, a.radius};
    } else if (a.kind == "ellipsoid") {
        kind = sc::ShapeKind::Ellipsoid;
        p.radii = parse_triple<double>(a.radii, "--radii");
    } else {
        kind = sc::ShapeKind::Box;
        p.lo = parse_triple<std::size_t>(a.lo, "--lo");
        p.hi = parse_triple<std::size_t>(a.hi, "--hi");
    }
    const auto vol = sc::synth_mask(kind, p, {d[0], d[1], d[2]});
    sc::save_npy(vol, a.out);
    std::cerr << "shapecore: wrote " << vol.occupied_count() << " occupied voxels to " << a.out << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape features (mesh volume, surface area, diameters) from binary NPY masks"};
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "Compute shape features for one mask");
    extract->add_option("--mask", ex.mask, "Mask .npy file")->required();
    extract->add_option("--spacing", ex.spacing, "Voxel spacing sx,sy,sz in mm");
    extract->add_option("--backend", ex.backend, "auto | seq | par");
    extract->add_option("--workers", ex.workers, "Worker count for the parallel backend")
        ->check(CLI::PositiveNumber);
    extract->add_option("--label", ex.label, "Foreground label (default: any nonzero)");
    auto* json_flag = extract->add_flag("--json", ex.json, "Print the feature record as JSON");
    extract->add_flag("--tsv", ex.tsv, "Print features and timings as TSV")->excludes(json_flag);
    extract->add_option("--dump-mesh", ex.dump_mesh, "Write the mesh as .off (ASCII) or .stl (binary)");

    BenchArgs bn;
    auto* bench = app.add_subcommand("bench", "Stage-timed benchmark over a directory of masks");
    bench->add_option("--dataset", bn.dataset, "Directory of .npy masks")->required();
    bench->add_option("--spacing", bn.spacing, "Voxel spacing sx,sy,sz in mm");
    bench->add_option("--backends", bn.backends, "Comma-separated backends");
    bench->add_option("--repeats", bn.repeats, "Timed runs per case and backend");
    bench->add_option("--warmups", bn.warmups, "Untimed runs before timing");
    bench->add_option("--workers", bn.workers, "Worker count for the parallel backend")
        ->check(CLI::PositiveNumber);
    bench->add_option("--label", bn.label, "Foreground label (default: any nonzero)");
    bench->add_option("--out", bn.out, "Output TSV (default: stdout)");

    std::string sp_in, sp_baseline = "seq", sp_out;
    auto* speedup = app.add_subcommand("speedup", "Per-case speedups against a baseline backend");
    speedup->add_option("--in", sp_in, "Bench TSV")->required();
    speedup->add_option("--baseline", sp_baseline, "Baseline backend label");
    speedup->add_option("--out", sp_out, "Output TSV (default: stdout)");

    std::string pd_in, pd_out;
    auto* plotdata = app.add_subcommand("plotdata", "Median total time per case for log-log plots");
    plotdata->add_option("--in", pd_in, "Bench TSV")->required();
    plotdata->add_option("--out", pd_out, "Output TSV (default: stdout)");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Write a synthetic mask");
    synth->add_option("kind", sy.kind, "sphere | ellipsoid | box")
        ->required()
        ->check(CLI::IsMember({"sphere", "ellipsoid", "box"}));
    synth->add_option("--dims", sy.dims, "nx,ny,nz")->required();
    synth->add_option("--radius", sy.radius, "Sphere radius (voxels)");
    synth->add_option("--radii", sy.radii, "Ellipsoid semi-axes rx,ry,rz (voxels)");
    synth->add_option("--center", sy.center, "Centre cx,cy,cz (voxels, default grid centre)");
    synth->add_option("--lo", sy.lo, "Box lower corner (inclusive voxel indices)");
    synth->add_option("--hi", sy.hi, "Box upper corner (inclusive voxel indices)");
    synth->add_option("--out", sy.out, "Output .npy")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    const bool bench_context = bench->parsed() || speedup->parsed() || plotdata->parsed();
    try {
        if (extract->parsed()) return run_extract(ex);
        if (bench->parsed()) return run_bench(bn);
        if (speedup->parsed()) return run_speedup(sp_in, sp_baseline, sp_out);
        if (plotdata->parsed()) return run_plotdata(pd_in, pd_out);
        return run_synth(sy);
    } catch (const sc::Error& e) {
        std::cerr << "shapecore: " << e.what() << '\n';
        return exit_code_for(e, bench_context);
    } catch (const std::exception& e) {
        std::cerr << "shapecore: " << e.what() << '\n';
        return kInputError;
    }
}
