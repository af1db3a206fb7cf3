#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "shapecore/features.hpp"
#include "shapecore/timing.hpp"
#include "shapecore/volume.hpp"

namespace shapecore {

enum class Backend { Sequential, Parallel };
enum class BackendRequest { Auto, Sequential, Parallel };

std::string_view to_string(Backend backend) noexcept;
std::string_view to_string(BackendRequest request) noexcept;

/// Accepts "auto", "seq"/"sequential", "par"/"parallel". Throws InvalidArgument.
BackendRequest parse_backend_request(std::string_view text);

struct BackendSelection {
    BackendRequest requested = BackendRequest::Sequential;
    Backend resolved = Backend::Sequential;
    std::optional<std::string> fallback_reason;
    unsigned worker_count = 1;

    static BackendSelection sequential() { return {}; }
    static BackendSelection parallel(unsigned workers) {
        return {BackendRequest::Parallel, Backend::Parallel, std::nullopt, workers};
    }
};

/// What the dispatcher may ask about the environment.
struct CapabilityProbe {
    unsigned hardware_workers = 1;
    /// False when the worker pool cannot be brought up.
    std::function<bool()> pool_available;

    /// Reads std::thread::hardware_concurrency(), honours
    /// SHAPECORE_FORCE_SEQUENTIAL=1 and tries to start a worker thread.
    static CapabilityProbe system();
};

inline constexpr std::string_view kForceSequentialEnv = "SHAPECORE_FORCE_SEQUENTIAL";
inline constexpr std::string_view kParallelUnavailable = "parallel backend unavailable";

/// Never throws. Sequential requests stay sequential; auto picks parallel when
/// at least two workers exist; a parallel request on a failing probe falls
/// back to sequential with a reason. `workers` overrides the worker count.
BackendSelection resolve_backend(BackendRequest requested, const CapabilityProbe& probe,
                                 std::optional<unsigned> workers = std::nullopt) noexcept;

BackendSelection resolve_backend(BackendRequest requested,
                                 std::optional<unsigned> workers = std::nullopt);

struct PipelineResult {
    ShapeFeatures features;
    StageTimings timings;
    BackendSelection backend;
};

/// load_npy -> attach_spacing -> extract_features. total_ms spans all of it.
PipelineResult run_pipeline(const std::filesystem::path& mask_path, Spacing spacing,
                            const BackendSelection& backend,
                            std::optional<std::int64_t> label = std::nullopt);

PipelineResult run_pipeline(const std::filesystem::path& mask_path, Spacing spacing,
                            BackendRequest requested,
                            std::optional<unsigned> workers = std::nullopt,
                            std::optional<std::int64_t> label = std::nullopt);

}  // namespace shapecore
