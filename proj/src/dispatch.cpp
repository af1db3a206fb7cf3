#include "shapecore/dispatch.hpp"

#include <cstdlib>
#include <thread>

#include "shapecore/error.hpp"
#include "shapecore/npy.hpp"

namespace shapecore {

std::string_view to_string(Backend backend) noexcept {
    return backend == Backend::Parallel ? "par" : "seq";
}

std::string_view to_string(BackendRequest request) noexcept {
    switch (request) {
        case BackendRequest::Auto: return "auto";
        case BackendRequest::Sequential: return "seq";
        case BackendRequest::Parallel: return "par";
    }
    return "auto";
}

BackendRequest parse_backend_request(std::string_view text) {
    if (text == "auto") return BackendRequest::Auto;
    if (text == "seq" || text == "sequential") return BackendRequest::Sequential;
    if (text == "par" || text == "parallel") return BackendRequest::Parallel;
    throw Error(ErrorCode::InvalidArgument, "unknown backend '" + std::string(text) + "'");
}

CapabilityProbe CapabilityProbe::system() {
    CapabilityProbe probe;
    probe.hardware_workers = std::max(1u, std::thread::hardware_concurrency());
    probe.pool_available = [] {
        const char* force = std::getenv(kForceSequentialEnv.data());
        if (force != nullptr && std::string_view(force) == "1") return false;
        try {
            std::jthread t([] {});
            return true;
        } catch (const std::system_error&) {
            return false;
        }
    };
    return probe;
}

BackendSelection resolve_backend(BackendRequest requested, const CapabilityProbe& probe,
                                 std::optional<unsigned> workers) noexcept {
    BackendSelection sel;
    sel.requested = requested;
    sel.resolved = Backend::Sequential;
    sel.worker_count = 1;
    if (requested == BackendRequest::Sequential) return sel;

    bool available = false;
    try {
        available = probe.pool_available ? probe.pool_available() : true;
    } catch (...) {
        available = false;
    }
    const unsigned hw = std::max(1u, probe.hardware_workers);

    if (requested == BackendRequest::Auto) {
        if (!available) {
            sel.fallback_reason = std::string(kParallelUnavailable);
        } else if (hw < 2) {
            sel.fallback_reason = "single hardware worker";
        } else {
            sel.resolved = Backend::Parallel;
            sel.worker_count = workers.value_or(hw);
        }
        sel.worker_count = std::max(1u, sel.worker_count);
        return sel;
    }

    if (!available) {
        sel.fallback_reason = std::string(kParallelUnavailable);
        return sel;
    }
    sel.resolved = Backend::Parallel;
    sel.worker_count = std::max(1u, workers.value_or(hw));
    return sel;
}

BackendSelection resolve_backend(BackendRequest requested, std::optional<unsigned> workers) {
    return resolve_backend(requested, CapabilityProbe::system(), workers);
}

PipelineResult run_pipeline(const std::filesystem::path& mask_path, Spacing spacing,
                            const BackendSelection& backend, std::optional<std::int64_t> label) {
    const Stopwatch total;
    PipelineResult out;
    out.backend = backend;

    Stopwatch stage;
    const MaskVolume vol = attach_spacing(load_npy(mask_path, label), spacing);
    const double read_ms = stage.elapsed_ms();

    FeatureResult r = extract_features(vol, backend);
    out.features = r.features;
    out.timings = r.timings;
    out.timings.file_read_ms = read_ms;
    out.timings.total_ms = total.elapsed_ms();
    return out;
}

PipelineResult run_pipeline(const std::filesystem::path& mask_path, Spacing spacing,
                            BackendRequest requested, std::optional<unsigned> workers,
                            std::optional<std::int64_t> label) {
    return run_pipeline(mask_path, spacing, resolve_backend(requested, workers), label);
}

}  // namespace shapecore
